#pragma once

// Subcommand implementations. Each writes its primary output to `out`;
// `info` (may be null) receives human-readable summaries when the primary
// output goes to a file.

#include <iosfwd>
#include <string>
#include <vector>

#include "nvbeat/estimation/axis_search.hpp"
#include "run_config.hpp"

namespace nvbeat::cli {

inline constexpr const char* kVersion = NVBEAT_VERSION;

struct Context {
  RunConfig config;
  int threads = 1;
  std::ostream* info = nullptr;
};

/// "# nvbeat <version> config=<digest>"
std::string csv_preamble(const RunConfig& config);

struct SpectrumArgs {
  bool at_sta = false;
  /// Lines below this fraction of the strongest are dropped. The default only
  /// removes symmetry-forbidden lines (amplitude at rounding level).
  double min_relative_amplitude = 1e-15;
};
void cmd_spectrum(const Context& ctx, const SpectrumArgs& args, std::ostream& out);

struct ZqScanArgs {
  SweepAxis axis = SweepAxis::phi;
  double from = 0.0;
  double to = 360.0;
  double step = 10.0;
};
void cmd_zq_scan(const Context& ctx, const ZqScanArgs& args, std::ostream& out);

struct TraceArgs {
  bool at_sta = false;
};
void cmd_rabi(const Context& ctx, const TraceArgs& args, std::ostream& out);
void cmd_ramsey(const Context& ctx, const TraceArgs& args, std::ostream& out);

struct FitArgs {
  std::string dataset_path;
  std::vector<std::string> fixed;
  int bootstrap = 0;
  std::string residuals_path;
};
void cmd_fit(const Context& ctx, const FitArgs& args, std::ostream& out);

struct SensitivityArgs {
  bool at_sta = false;
  double step = 0.5;          ///< MHz
  double delta_omega = 0.2;   ///< MHz, frequency precision to propagate
};
void cmd_sensitivity(const Context& ctx, const SensitivityArgs& args, std::ostream& out);

void cmd_principal(const Context& ctx, std::ostream& out);

struct SynthArgs {
  /// Any of sq-sta, zq-phi-sweep, amp-theta-scan.
  std::vector<std::string> design{"sq-sta", "zq-phi-sweep"};
  double phi_step = 20.0;
};
void cmd_synth(const Context& ctx, const SynthArgs& args, std::ostream& out);

}  // namespace nvbeat::cli
