#pragma once

// Randomized invariant checks shared by the unit tests and the acceptance
// binary. Each property draws its own cases from a seeded generator.

#include <cstdint>
#include <string>
#include <vector>

namespace nvbeat::testing {

struct PropertyResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  double worst = 0.0;  ///< largest violation seen, in the property's own units
  std::string first_failure;

  bool passed() const { return failures == 0 && cases > 0; }
};

PropertyResult check_hermiticity(std::uint64_t seed, int cases = 1000);
PropertyResult check_trace_identity(std::uint64_t seed, int cases = 1000);
PropertyResult check_unitarity(std::uint64_t seed, int cases = 200);
PropertyResult check_mirror_symmetry(std::uint64_t seed, int cases = 500);
PropertyResult check_dark_state_stationarity(std::uint64_t seed, int cases = 500);
PropertyResult check_bounded_ramsey(std::uint64_t seed, int cases = 200);
PropertyResult check_seeded_synthesis(std::uint64_t seed, int cases = 20);

/// All of the above in a fixed order.
std::vector<PropertyResult> run_property_suite(std::uint64_t seed);

}  // namespace nvbeat::testing
