#pragma once

// Time-domain simulation: the three-level Λ model in the rotating frame, the
// full six-level propagation used for Rabi and zero-quantum Ramsey runs, and
// dephasing envelopes. Times in µs, frequencies in MHz, phases 2π·f·t.

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nvbeat/spin_core.hpp"
#include "nvbeat/types.hpp"

namespace nvbeat {

struct PulseParams {
  double rabi_amplitude = 0.0;    ///< MHz; Rabi frequency of an isolated m_S 0 <-> -1 line
  double carrier_detuning = 0.0;  ///< MHz, relative to the centre of the two Λ transitions
  double duration = 0.0;          ///< µs

  void validate() const;
};

enum class EnvelopeShape { exponential, gaussian };

const char* to_string(EnvelopeShape shape);
EnvelopeShape envelope_shape_from_string(const std::string& text);

struct DephasingEnvelope {
  double t2_star = 0.0;  ///< µs
  EnvelopeShape shape = EnvelopeShape::exponential;
};

struct RamseyTrace {
  std::vector<double> tau;     ///< ascending, µs
  std::vector<double> signal;  ///< m_S=0 population
  std::optional<DephasingEnvelope> envelope;

  /// Equal lengths and ascending τ; throws InvalidInput otherwise.
  void validate() const;
};

/// diag(0, δ, −Δ) with Ω+/2 on (1,2) and Ω−/2 on (2,3).
Eigen::Matrix3cd rotating_frame_h(double delta, double splitting, double omega_plus,
                                  double omega_minus);

struct HamiltonianSegment {
  Eigen::MatrixXcd h;     ///< Hermitian, MHz
  double duration = 0.0;  ///< µs
};

/// exp(−i 2π H t) for Hermitian H.
Eigen::MatrixXcd unitary_step(const Eigen::MatrixXcd& h, double t);

/// Applies the segments in order. Throws InvalidInput when ψ0 is not
/// normalized (tolerance 1e-10) or a segment has a negative duration.
Eigen::VectorXcd propagate(const std::vector<HamiltonianSegment>& segments,
                           const Eigen::VectorXcd& psi0);

/// Six-level model in the eigenbasis of H0 and the rotating frame of the
/// carrier. The carrier sits at the mean of the two m_S=0 -> excited
/// transitions plus the detuning; only m_S=0 <-> m_S=±1 drive elements are kept.
struct RotatingFrameModel {
  Eigensystem eig;
  LambdaAmplitudes lambda;
  std::vector<int> ground;   ///< m_S=0 eigenstate indices
  double carrier = 0.0;      ///< MHz
  Eigen::VectorXd energies;  ///< rotating-frame energies, MHz
  Eigen::MatrixXcd coupling; ///< drive operator per unit amplitude (S_x elements, RWA-masked)
  Eigen::VectorXi coherence_order;  ///< 0 for m_S=0, -1 / +1 for m_S=-1 / +1

  /// diag(energies) + rabi_amplitude/√2 · coupling.
  Eigen::MatrixXcd hamiltonian(double rabi_amplitude) const;
};

RotatingFrameModel rotating_frame_model(const SystemParams& params, const FieldOrientation& field,
                                        double carrier_detuning);

struct RabiOptions {
  /// Propagate the lab-frame Hamiltonian with counter-rotating terms at 100
  /// steps per carrier period. Slow; meant for validating the RWA.
  bool lab_frame = false;
};

/// p(m_S=0)(t) for an equal mixture of the two m_S=0 eigenstates under a
/// continuous drive. drive.duration is ignored; t_grid sets the times.
RamseyTrace simulate_rabi(const SystemParams& params, const FieldOrientation& field,
                          const PulseParams& drive, const std::vector<double>& t_grid,
                          const RabiOptions& options = {});

enum class PulseModel { square, ideal };

struct ZqRamseyOptions {
  /// Drive strength of the square pulses. 0 selects the value that makes the
  /// pulse an exact π rotation of the bright transition.
  double rabi_amplitude = 0.0;
  PulseModel pulse = PulseModel::square;
  /// Dephasing during free evolution. Coherences between manifolds decay with
  /// t2_sq (time constant divided by the coherence-order difference), those
  /// inside a manifold with t2_zq. Infinity keeps the evolution unitary.
  double t2_sq = std::numeric_limits<double>::infinity();
  double t2_zq = std::numeric_limits<double>::infinity();
  EnvelopeShape shape = EnvelopeShape::exponential;
};

/// π pulse, free evolution τ, π pulse; returns the m_S=0 population versus τ.
RamseyTrace simulate_zq_ramsey(const SystemParams& params, const FieldOrientation& field,
                               double pi_duration, double detuning, const std::vector<double>& tau_grid,
                               const ZqRamseyOptions& options = {});

/// Bright-transition π pulse for the Λ system of `model`: U = 1 − |e><e| − |B><B|
/// − i(|e><B| + |B><e|) in the eigenbasis.
Eigen::MatrixXcd ideal_pi_pulse(const RotatingFrameModel& model);

/// Drive amplitude whose bright transition has Rabi frequency `bright_rabi`.
double bright_calibrated_amplitude(const RotatingFrameModel& model, double bright_rabi);

/// Drive amplitude reproducing an observed Rabi frequency at `field`, where
/// one Λ transition should be (nearly) dark, as at the single-transition axis.
double calibrate_drive(const SystemParams& params, const FieldOrientation& field,
                       double observed_rabi_frequency);

/// τ of the first interior local minimum, refined by a 3-point parabola.
/// Throws NumericalError("no Rabi minimum found") for monotone traces.
double pi_pulse_from_rabi(const RamseyTrace& trace);

/// Multiplies signal − mean(signal) by exp(−τ/T2*) or exp(−(τ/T2*)²).
RamseyTrace apply_dephasing(const RamseyTrace& trace, double t2_star, EnvelopeShape shape);

/// Uniform grid of n points on [start, stop].
std::vector<double> linspace(double start, double stop, int n);

}  // namespace nvbeat
