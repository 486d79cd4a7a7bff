#pragma once

// Angle-scan datasets and their CSV form:
//   theta_deg,phi_deg,b_gauss,kind,value,sigma,transition_index
// Lines starting with '#' are comments. transition_index may be empty.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nvbeat/types.hpp"

namespace nvbeat {

enum class ObservableKind { sq_frequency, zq_frequency, zq_amplitude };

const char* to_string(ObservableKind kind);
/// Throws InvalidInput for unknown names.
ObservableKind observable_kind_from_string(const std::string& text);

struct ScanPoint {
  double theta_deg = 0.0;
  double phi_deg = 0.0;
  double b_gauss = 0.0;
  ObservableKind kind = ObservableKind::zq_frequency;
  double value = 0.0;  ///< MHz for frequencies, dimensionless for amplitudes
  double sigma = 0.0;  ///< same unit as value, > 0
  std::optional<int> transition_index;  ///< 0..3 into the sorted main lines (SQ only)
};

struct ScanDataset {
  std::vector<ScanPoint> points;
  Frame frame = Frame::nv;

  /// sigma > 0, finite values, SQ points carry an index in 0..3.
  void validate() const;
};

inline constexpr const char* kDatasetHeader = "theta_deg,phi_deg,b_gauss,kind,value,sigma,transition_index";

/// `source` names the input in error messages ("file:line: ...").
ScanDataset read_dataset_csv(std::istream& in, const std::string& source = "<stream>");
ScanDataset read_dataset_file(const std::string& path);

/// Writes the header and one row per point with round-trip precision.
void write_dataset_csv(std::ostream& out, const ScanDataset& dataset);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace nvbeat
