#pragma once

// Run configuration: flat "key = value" text with dotted sections.
//
//   # comment
//   tensor.a_xx = 166.9
//   field.frame = NV
//
// Every key has a default; unknown or repeated keys are errors.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nvbeat/dynamics.hpp"
#include "nvbeat/estimation/synthesis.hpp"
#include "nvbeat/types.hpp"

namespace nvbeat::cli {

struct RunConfig {
  SystemParams system{};
  HyperfineTensor tensor_sigma{};  ///< 1σ of the tensor, for principal-axis propagation

  double b = 40.3;      ///< Gauss
  double theta = 40.0;  ///< degrees, in `frame`
  double phi = 90.0;    ///< degrees, in `frame`
  Frame frame = Frame::nv;
  NvAxis nv_axis{};     ///< used when frame is LAB

  double rabi_frequency = 14.3;  ///< MHz observed at the single-transition axis
  double rabi_t_max = 2.0;       ///< µs
  int rabi_n_points = 1001;

  std::optional<double> pi_duration;  ///< µs; empty selects "auto" (from the Rabi trace)
  double detuning = 5.0;              ///< MHz
  double tau_max = 20.0;              ///< µs
  int n_points = 2001;
  double t2_star = std::numeric_limits<double>::infinity();  ///< µs, ZQ coherence
  double t2_sq = std::numeric_limits<double>::infinity();    ///< µs, SQ coherences
  EnvelopeShape envelope = EnvelopeShape::exponential;

  NoiseSigma noise{0.2, 0.2, 0.0};
  FieldImperfection imperfection{0.0, 120.0, 0.0};  ///< disabled while amplitude is 0
  double phi_offset = 0.0;  ///< initial fit value, degrees

  std::uint64_t seed = 1;

  /// The configured field, rotated into the NV frame.
  FieldOrientation field() const;
  std::optional<FieldImperfection> imperfection_if_enabled() const;

  /// Throws InvalidInput naming the offending key.
  void validate() const;
};

/// `source` prefixes error messages as "source:line: ...".
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Canonical text: every key, fixed order, shortest round-trip numbers.
std::string emit_config(const RunConfig& config);

/// All recognized keys in canonical order.
std::vector<std::string> config_keys();

/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_digest(const RunConfig& config);

}  // namespace nvbeat::cli
