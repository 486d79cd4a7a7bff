#include "nvbeat/analytic_models.hpp"

#include <cmath>

#include "nvbeat/errors.hpp"
#include "nvbeat/spin_core.hpp"

namespace nvbeat {

double delta_perturbative(const HyperfineTensor& tensor, const FieldOrientation& field, double d,
                          double gamma_e) {
  if (!(d > 0.0)) throw InvalidInput("zero-field splitting d must be > 0");
  const double th = deg_to_rad(field.theta());
  const double ph = deg_to_rad(field.phi());
  const double c2 = std::cos(ph) * std::cos(ph);
  const double s2 = std::sin(ph) * std::sin(ph);
  const double prefactor = 2.0 * gamma_e * field.b() * std::sin(th) / d;
  return prefactor * (std::hypot(tensor.a_xx, tensor.a) * c2 + tensor.a_yy * s2);
}

SecondOrderSplitting delta_second_order_sum(const SystemParams& params, const FieldOrientation& field,
                                            const SecondOrderOptions& options) {
  SystemParams p = params;
  if (!options.include_nuclear_zeeman) p.gamma_n = 0.0;
  const Matrix6cd h = build_hamiltonian(p, field);

  // β± follow the field direction even at b = 0, so no Zeeman-axis check here.
  const double half = deg_to_rad(field.theta()) / 2.0;
  const cd phase = std::polar(1.0, deg_to_rad(field.phi()));
  Matrix6cd basis = Matrix6cd::Identity();
  basis.block<2, 2>(2, 2) << std::cos(half), std::sin(half),
                             phase * std::sin(half), -phase * std::cos(half);
  const Matrix6cd hb = basis.adjoint() * h * basis;

  const double e0 = 0.5 * (hb(2, 2).real() + hb(3, 3).real());
  const double scale = std::max(1.0, hb.cwiseAbs().maxCoeff());
  Eigen::Matrix2cd block = hb.block<2, 2>(2, 2);
  for (int i : {0, 1, 4, 5}) {
    const double denom = e0 - hb(i, i).real();
    if (std::abs(denom) < 1e-9 * scale) throw NumericalError("degenerate denominator");
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        block(j, k) += hb(2 + j, i) * hb(i, 2 + k) / denom;
      }
    }
  }

  SecondOrderSplitting out;
  out.block = block;
  out.diagonal_sum = (block(0, 0) - block(1, 1)).real();
  const double mean_diff = 0.5 * (block(0, 0) - block(1, 1)).real();
  out.delta = 2.0 * std::sqrt(mean_diff * mean_diff + std::norm(block(0, 1)));
  out.perturbation_valid = params.gamma_e * field.b() <= params.d / 10.0;
  return out;
}

EffectiveCouplings effective_couplings(const HyperfineTensor& tensor) {
  EffectiveCouplings out;
  out.a_zz_eff = std::hypot(tensor.a_zz, tensor.a);
  out.a_xx_eff = std::hypot(tensor.a_xx, tensor.a);
  out.theta_prime_deg = rad_to_deg(std::atan2(tensor.a, tensor.a_zz));
  out.theta_double_prime_deg = rad_to_deg(2.0 * std::atan2(-tensor.a, tensor.a_xx));
  return out;
}

BrightDarkDecomposition bright_dark(double omega_plus, double omega_minus) {
  if (!(omega_plus >= 0.0) || !(omega_minus >= 0.0)) {
    throw InvalidInput("transition amplitudes must be >= 0");
  }
  const double norm = std::hypot(omega_plus, omega_minus);
  if (!(norm > 0.0)) throw InvalidInput("bright state undefined: both amplitudes are zero");
  BrightDarkDecomposition out;
  out.lambda_angle = std::atan2(omega_minus, omega_plus);
  out.bright << omega_plus / norm, 0.0, omega_minus / norm;
  out.dark << omega_minus / norm, 0.0, -omega_plus / norm;
  return out;
}

Eigen::Matrix3cd lambda_drive_matrix(double omega_plus, double omega_minus) {
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  m(0, 1) = m(1, 0) = omega_plus;
  m(1, 2) = m(2, 1) = omega_minus;
  return m;
}

Eigen::Matrix3cd transformed_drive(const BrightDarkDecomposition& bd, double omega_plus,
                                   double omega_minus) {
  Eigen::Matrix3cd u;
  u.col(0) = bd.bright;
  u.col(1) = Eigen::Vector3cd::UnitY();
  u.col(2) = bd.dark;
  return u.adjoint() * lambda_drive_matrix(omega_plus, omega_minus) * u;
}

void RamseyModelParams::validate() const {
  if (!(omega_plus >= 0.0) || !(omega_minus >= 0.0)) {
    throw InvalidInput("transition amplitudes must be >= 0");
  }
  if (!(omega_plus + omega_minus > 0.0)) throw InvalidInput("omega_plus + omega_minus must be > 0");
  if (!std::isfinite(delta_splitting)) throw InvalidInput("delta_splitting must be finite");
  if (n_spins < 1) throw InvalidInput("n_spins must be >= 1");
}

double zq_ramsey_v_amplitude(double omega_plus, double omega_minus) {
  const double s = omega_plus * omega_plus + omega_minus * omega_minus;
  if (!(s > 0.0)) return 0.0;
  const double r = omega_plus * omega_minus / s;
  return 2.0 * r * r;
}

std::vector<double> zq_ramsey_v(const RamseyModelParams& params, const std::vector<double>& tau) {
  params.validate();
  const double p2 = params.omega_plus * params.omega_plus;
  const double m2 = params.omega_minus * params.omega_minus;
  const double offset = (p2 * p2 + m2 * m2) / ((p2 + m2) * (p2 + m2));
  const double amp = zq_ramsey_v_amplitude(params.omega_plus, params.omega_minus);
  std::vector<double> out;
  out.reserve(tau.size());
  for (double t : tau) {
    out.push_back(offset + amp * std::cos(2.0 * std::numbers::pi * params.delta_splitting * t));
  }
  return out;
}

std::vector<double> zq_ramsey_lambda(const RamseyModelParams& params, const std::vector<double>& tau) {
  std::vector<double> out = zq_ramsey_v(params, tau);
  const double w = std::ldexp(1.0, -params.n_spins);
  for (double& v : out) v = (1.0 - w) + w * v;
  return out;
}

}  // namespace nvbeat
