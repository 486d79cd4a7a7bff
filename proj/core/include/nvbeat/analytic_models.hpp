#pragma once

// Closed-form observables: the perturbative ground-manifold splitting, the
// effective couplings, the bright/dark decomposition of a Λ system and the
// V-type / Λ-type zero-quantum Ramsey signals.

#include <vector>

#include <Eigen/Dense>

#include "nvbeat/types.hpp"

namespace nvbeat {

/// Δ = (2 γe B sinθ / D)(√(A_xx² + a²) cos²φ + A_yy sin²φ), in MHz.
double delta_perturbative(const HyperfineTensor& tensor, const FieldOrientation& field, double d,
                          double gamma_e);

struct SecondOrderSplitting {
  double delta = 0.0;           ///< splitting of the effective m_S=0 block, MHz (>= 0)
  Eigen::Matrix2cd block;       ///< effective Hamiltonian on (|0,β+>, |0,β->)
  double diagonal_sum = 0.0;    ///< block(0,0) - block(1,1): the plain diagonal sum
  bool perturbation_valid = true;  ///< false when γe B > D / 10
};

struct SecondOrderOptions {
  /// Keep the nuclear Zeeman term in the block. Off by default: its
  /// contribution is dropped in the closed form as well.
  bool include_nuclear_zeeman = false;
};

/// Second-order sum over the four m_S=±1 states in the basis
/// |±1, ±½>, |0, β±>, |−1, ±½>. The m_S=0 block receives
///   H_eff(j,k) = H(j,k) + Σ_i H(j,i) H(i,k) / (E_0 − H(i,i)),
/// with E_0 the mean m_S=0 diagonal energy, and its eigenvalue gap is
/// returned. Throws NumericalError("degenerate denominator") when an
/// intermediate energy coincides with E_0.
SecondOrderSplitting delta_second_order_sum(const SystemParams& params, const FieldOrientation& field,
                                            const SecondOrderOptions& options = {});

struct EffectiveCouplings {
  double a_zz_eff = 0.0;  ///< √(A_zz² + a²)
  double a_xx_eff = 0.0;  ///< √(A_xx² + a²)
  double theta_prime_deg = 0.0;         ///< atan2(a, A_zz)
  double theta_double_prime_deg = 0.0;  ///< 2 atan2(−a, A_xx)
};

EffectiveCouplings effective_couplings(const HyperfineTensor& tensor);

/// Basis (|1>, |2>, |3>) = (ground+, excited, ground−).
struct BrightDarkDecomposition {
  double lambda_angle = 0.0;  ///< radians, tan λ = Ω−/Ω+
  Eigen::Vector3cd bright;
  Eigen::Vector3cd dark;
};

/// Throws InvalidInput when both amplitudes vanish or one is negative.
BrightDarkDecomposition bright_dark(double omega_plus, double omega_minus);

/// Drive matrix with Ω+ on |1>↔|2> and Ω− on |2>↔|3>.
Eigen::Matrix3cd lambda_drive_matrix(double omega_plus, double omega_minus);

/// The drive re-expressed in the basis (bright, |2>, dark). Only the
/// bright↔|2> element survives, with strength √(Ω+² + Ω−²).
Eigen::Matrix3cd transformed_drive(const BrightDarkDecomposition& bd, double omega_plus,
                                   double omega_minus);

struct RamseyModelParams {
  double omega_plus = 0.0;
  double omega_minus = 0.0;
  double delta_splitting = 0.0;  ///< MHz
  int n_spins = 1;

  void validate() const;
};

/// p(τ) = (Ω+⁴ + Ω−⁴)/(Ω+² + Ω−²)² + 2 (Ω+Ω−/(Ω+² + Ω−²))² cos(2πΔτ).
std::vector<double> zq_ramsey_v(const RamseyModelParams& params, const std::vector<double>& tau);

/// p(τ) = (1 − 2^−N) + 2^−N p_V(τ).
std::vector<double> zq_ramsey_lambda(const RamseyModelParams& params, const std::vector<double>& tau);

/// Oscillation amplitude 2 (Ω+Ω−/(Ω+² + Ω−²))² of the V-type signal.
double zq_ramsey_v_amplitude(double omega_plus, double omega_minus);

}  // namespace nvbeat
