#pragma once

// Synthetic angle-scan datasets from the exact forward model.

#include <cstdint>
#include <optional>
#include <vector>

#include "nvbeat/estimation/forward_model.hpp"
#include "nvbeat/estimation/scan_dataset.hpp"

namespace nvbeat {

struct DesignPoint {
  double theta_deg = 0.0;
  double phi_deg = 0.0;
  ObservableKind kind = ObservableKind::zq_frequency;
  std::optional<int> transition_index;
};

/// Gaussian noise σ per observable kind. A zero σ adds no noise; the recorded
/// point σ then falls back to the matching floor so the dataset stays valid.
struct NoiseSigma {
  double sq_frequency = 0.0;  ///< MHz
  double zq_frequency = 0.0;  ///< MHz
  double zq_amplitude = 0.0;
  double frequency_floor = 0.2;
  double amplitude_floor = 0.01;

  double noise(ObservableKind kind) const;
  double recorded(ObservableKind kind) const;
};

/// Field-magnitude error that depends on the rotation angle:
/// B(φ) = B0 + amplitude · cos(360°·φ/period + phase).
struct FieldImperfection {
  double amplitude = 0.0;  ///< Gauss
  double period = 120.0;   ///< degrees
  double phase = 0.0;      ///< degrees

  double field(double b0, double phi_deg) const;
};

/// Evaluates the forward model at `truth` for each design point, with the
/// field perturbed by `imperfection` if given, then adds noise drawn from a
/// generator seeded with `seed`. Points record the nominal field truth.b, so
/// the imperfection is invisible to a fit. Deterministic for a fixed seed.
ScanDataset synthesize_dataset(const SystemParams& base, const FitParameters& truth,
                               const std::vector<DesignPoint>& design, const NoiseSigma& noise,
                               const std::optional<FieldImperfection>& imperfection, std::uint64_t seed);

/// The four main SQ lines at one orientation.
std::vector<DesignPoint> sq_lines_design(double theta_deg, double phi_deg);

/// ZQ frequencies on φ = phi_start, phi_start + step, ... up to phi_stop inclusive.
std::vector<DesignPoint> zq_phi_sweep_design(double theta_deg, double phi_start = 0.0, double phi_stop = 360.0,
                                             double step = 20.0);

/// ZQ amplitudes at fixed φ over the given polar angles.
std::vector<DesignPoint> zq_amplitude_theta_design(double phi_deg, const std::vector<double>& thetas);

}  // namespace nvbeat
