#include "nvbeat/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nvbeat/errors.hpp"

namespace nvbeat {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int coherence_order_of(Manifold m) {
  switch (m) {
    case Manifold::ms0: return 0;
    case Manifold::ms_minus: return -1;
    case Manifold::ms_plus: return 1;
  }
  return 0;
}

double envelope_factor(double tau, double t2, EnvelopeShape shape) {
  if (!std::isfinite(t2)) return 1.0;
  const double x = tau / t2;
  return shape == EnvelopeShape::exponential ? std::exp(-x) : std::exp(-x * x);
}

void check_grid(const std::vector<double>& grid) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw InvalidInput("time grid must be strictly ascending");
  }
  if (!grid.empty() && !(grid.front() >= 0.0)) throw InvalidInput("time grid must start at >= 0");
}

double ground_population(const Eigen::MatrixXcd& rho, const std::vector<int>& ground) {
  double p = 0.0;
  for (int g : ground) p += rho(g, g).real();
  return p;
}

}  // namespace

void PulseParams::validate() const {
  if (!(rabi_amplitude >= 0.0) || !std::isfinite(rabi_amplitude)) {
    throw InvalidInput("rabi_amplitude must be finite and >= 0");
  }
  if (!(duration >= 0.0)) throw InvalidInput("pulse duration must be >= 0");
  if (!std::isfinite(carrier_detuning)) throw InvalidInput("carrier_detuning must be finite");
}

const char* to_string(EnvelopeShape shape) {
  return shape == EnvelopeShape::exponential ? "exponential" : "gaussian";
}

EnvelopeShape envelope_shape_from_string(const std::string& text) {
  if (text == "exponential") return EnvelopeShape::exponential;
  if (text == "gaussian") return EnvelopeShape::gaussian;
  throw InvalidInput("unknown envelope shape '" + text + "' (expected exponential or gaussian)");
}

void RamseyTrace::validate() const {
  if (tau.size() != signal.size()) throw InvalidInput("trace tau and signal lengths differ");
  for (std::size_t i = 1; i < tau.size(); ++i) {
    if (!(tau[i] > tau[i - 1])) throw InvalidInput("trace time grid must be strictly ascending");
  }
}

Eigen::Matrix3cd rotating_frame_h(double delta, double splitting, double omega_plus,
                                  double omega_minus) {
  Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
  h(1, 1) = delta;
  h(2, 2) = -splitting;
  h(0, 1) = h(1, 0) = omega_plus / 2.0;
  h(1, 2) = h(2, 1) = omega_minus / 2.0;
  return h;
}

Eigen::MatrixXcd unitary_step(const Eigen::MatrixXcd& h, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (h + h.adjoint()));
  const Eigen::VectorXcd phases =
      (solver.eigenvalues().cast<cd>() * cd(0.0, -kTwoPi * t)).array().exp().matrix();
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

Eigen::VectorXcd propagate(const std::vector<HamiltonianSegment>& segments,
                           const Eigen::VectorXcd& psi0) {
  if (std::abs(psi0.norm() - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "initial state must be normalized (norm = " << psi0.norm() << ")";
    throw InvalidInput(msg.str());
  }
  Eigen::VectorXcd psi = psi0;
  for (const auto& seg : segments) {
    if (!(seg.duration >= 0.0)) throw InvalidInput("segment duration must be >= 0");
    if (seg.h.rows() != psi.size() || seg.h.cols() != psi.size()) {
      throw InvalidInput("segment Hamiltonian dimension does not match the state");
    }
    if ((seg.h - seg.h.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
      throw InvalidInput("segment Hamiltonian is not Hermitian");
    }
    psi = unitary_step(seg.h, seg.duration) * psi;
  }
  return psi;
}

Eigen::MatrixXcd RotatingFrameModel::hamiltonian(double rabi_amplitude) const {
  Eigen::MatrixXcd h = coupling * cd(rabi_amplitude / std::numbers::sqrt2);
  h.diagonal() += energies.cast<cd>();
  return h;
}

RotatingFrameModel rotating_frame_model(const SystemParams& params, const FieldOrientation& field,
                                        double carrier_detuning) {
  RotatingFrameModel m;
  m.eig = solve(params, field);
  m.lambda = lambda_transition_amplitudes(m.eig, params, field);
  m.ground = m.eig.states(Manifold::ms0);
  const auto& e = m.eig.values;
  const double e_excited = e[static_cast<std::size_t>(m.lambda.excited)];
  const double e_gp = e[static_cast<std::size_t>(m.lambda.ground_plus)];
  const double e_gm = e[static_cast<std::size_t>(m.lambda.ground_minus)];
  m.carrier = 0.5 * ((e_excited - e_gp) + (e_excited - e_gm)) + carrier_detuning;
  const double ground_mean = 0.5 * (e_gp + e_gm);

  m.energies.resize(6);
  m.coherence_order.resize(6);
  for (int k = 0; k < 6; ++k) {
    const Manifold mk = m.eig.manifold[static_cast<std::size_t>(k)];
    const double shift = mk == Manifold::ms0 ? 0.0 : m.carrier;
    m.energies(k) = e[static_cast<std::size_t>(k)] - shift - ground_mean;
    m.coherence_order(k) = coherence_order_of(mk);
  }

  const Matrix6cd sx = m.eig.vectors.adjoint() * electron_drive() * m.eig.vectors;
  m.coupling = Eigen::MatrixXcd::Zero(6, 6);
  for (int j = 0; j < 6; ++j) {
    for (int k = 0; k < 6; ++k) {
      const bool j0 = m.coherence_order(j) == 0;
      const bool k0 = m.coherence_order(k) == 0;
      if (j0 != k0) m.coupling(j, k) = sx(j, k);
    }
  }
  return m;
}

namespace {

std::vector<double> rabi_rwa(const RotatingFrameModel& model, double amplitude,
                             const std::vector<double>& t_grid) {
  const Eigen::MatrixXcd h = model.hamiltonian(amplitude);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  const Eigen::MatrixXcd& w = solver.eigenvectors();
  std::vector<double> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    const Eigen::VectorXcd phases =
        (solver.eigenvalues().cast<cd>() * cd(0.0, -kTwoPi * t)).array().exp().matrix();
    const Eigen::MatrixXcd u = w * phases.asDiagonal() * w.adjoint();
    double p = 0.0;
    for (int g0 : model.ground) {
      for (int g : model.ground) p += 0.5 * std::norm(u(g, g0));
    }
    out.push_back(p);
  }
  return out;
}

std::vector<double> rabi_lab(const RotatingFrameModel& model, double amplitude,
                             const std::vector<double>& t_grid) {
  const Matrix6cd sx = model.eig.vectors.adjoint() * electron_drive() * model.eig.vectors;
  Eigen::VectorXd e0(6);
  for (int k = 0; k < 6; ++k) e0(k) = model.eig.values[static_cast<std::size_t>(k)];
  const double dt_max = 1.0 / (100.0 * model.carrier);
  const double drive = std::numbers::sqrt2 * amplitude;

  std::vector<Eigen::VectorXcd> states;
  for (int g : model.ground) states.push_back(Eigen::VectorXcd::Unit(6, g));

  std::vector<double> out;
  out.reserve(t_grid.size());
  double t = 0.0;
  for (double target : t_grid) {
    while (t < target - 1e-15) {
      const double dt = std::min(dt_max, target - t);
      const double mid = t + 0.5 * dt;
      Eigen::MatrixXcd h = sx * cd(drive * std::cos(kTwoPi * model.carrier * mid));
      h.diagonal() += e0.cast<cd>();
      const Eigen::MatrixXcd u = unitary_step(h, dt);
      for (auto& s : states) s = u * s;
      t += dt;
    }
    double p = 0.0;
    for (const auto& s : states) {
      for (int g : model.ground) p += 0.5 * std::norm(s(g));
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace

RamseyTrace simulate_rabi(const SystemParams& params, const FieldOrientation& field,
                          const PulseParams& drive, const std::vector<double>& t_grid,
                          const RabiOptions& options) {
  drive.validate();
  RamseyTrace trace;
  check_grid(t_grid);
  trace.tau = t_grid;
  const RotatingFrameModel model = rotating_frame_model(params, field, drive.carrier_detuning);
  trace.signal = options.lab_frame ? rabi_lab(model, drive.rabi_amplitude, t_grid)
                                   : rabi_rwa(model, drive.rabi_amplitude, t_grid);
  return trace;
}

double bright_calibrated_amplitude(const RotatingFrameModel& model, double bright_rabi) {
  const double n = std::hypot(std::abs(model.lambda.element_plus), std::abs(model.lambda.element_minus));
  if (!(n > 0.0)) throw NumericalError("bright transition has zero drive strength");
  return bright_rabi / (std::numbers::sqrt2 * n);
}

double calibrate_drive(const SystemParams& params, const FieldOrientation& field,
                       double observed_rabi_frequency) {
  if (!(observed_rabi_frequency > 0.0)) throw InvalidInput("observed Rabi frequency must be > 0");
  return bright_calibrated_amplitude(rotating_frame_model(params, field, 0.0), observed_rabi_frequency);
}

Eigen::MatrixXcd ideal_pi_pulse(const RotatingFrameModel& model) {
  const LambdaAmplitudes& l = model.lambda;
  const double n = std::hypot(std::abs(l.element_plus), std::abs(l.element_minus));
  if (!(n > 0.0)) throw NumericalError("bright transition has zero drive strength");
  Eigen::VectorXcd bright = Eigen::VectorXcd::Zero(6);
  bright(l.ground_plus) = std::conj(l.element_plus) / n;
  bright(l.ground_minus) = std::conj(l.element_minus) / n;
  const Eigen::VectorXcd excited = Eigen::VectorXcd::Unit(6, l.excited);
  const cd i(0.0, 1.0);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(6, 6);
  u -= excited * excited.adjoint() + bright * bright.adjoint();
  u -= i * (excited * bright.adjoint() + bright * excited.adjoint());
  return u;
}

RamseyTrace simulate_zq_ramsey(const SystemParams& params, const FieldOrientation& field,
                               double pi_duration, double detuning, const std::vector<double>& tau_grid,
                               const ZqRamseyOptions& options) {
  if (!(pi_duration > 0.0)) throw InvalidInput("pi_duration must be > 0");
  if (!(options.t2_sq > 0.0) || !(options.t2_zq > 0.0)) throw InvalidInput("coherence times must be > 0");
  RamseyTrace trace;
  check_grid(tau_grid);
  trace.tau = tau_grid;

  const RotatingFrameModel model = rotating_frame_model(params, field, detuning);
  Eigen::MatrixXcd pulse;
  if (options.pulse == PulseModel::ideal) {
    pulse = ideal_pi_pulse(model);
  } else {
    const double amp = options.rabi_amplitude > 0.0
                           ? options.rabi_amplitude
                           : bright_calibrated_amplitude(model, 1.0 / (2.0 * pi_duration));
    pulse = unitary_step(model.hamiltonian(amp), pi_duration);
  }

  Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(6, 6);
  for (int g : model.ground) rho0(g, g) = 0.5;
  const Eigen::MatrixXcd rho1 = pulse * rho0 * pulse.adjoint();

  trace.signal.reserve(tau_grid.size());
  Eigen::MatrixXcd rho(6, 6);
  for (double tau : tau_grid) {
    for (int k = 0; k < 6; ++k) {
      for (int l = 0; l < 6; ++l) {
        double decay = 1.0;
        if (k != l) {
          const int dq = std::abs(model.coherence_order(k) - model.coherence_order(l));
          decay = dq > 0 ? envelope_factor(tau * dq, options.t2_sq, options.shape)
                         : envelope_factor(tau, options.t2_zq, options.shape);
        }
        const double phase = -kTwoPi * (model.energies(k) - model.energies(l)) * tau;
        rho(k, l) = rho1(k, l) * std::polar(decay, phase);
      }
    }
    const Eigen::MatrixXcd rho2 = pulse * rho * pulse.adjoint();
    trace.signal.push_back(ground_population(rho2, model.ground));
  }
  if (std::isfinite(options.t2_zq)) trace.envelope = DephasingEnvelope{options.t2_zq, options.shape};
  return trace;
}

double pi_pulse_from_rabi(const RamseyTrace& trace) {
  trace.validate();
  const auto& s = trace.signal;
  const auto& t = trace.tau;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] < s[i - 1] && s[i] <= s[i + 1]) {
      // Vertex of the parabola through the three neighbouring samples.
      const double x0 = t[i - 1], x1 = t[i], x2 = t[i + 1];
      const double y0 = s[i - 1], y1 = s[i], y2 = s[i + 1];
      const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
      const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
      if (std::abs(den) < 1e-300) return x1;
      return std::clamp(x1 - 0.5 * num / den, x0, x2);
    }
  }
  throw NumericalError("no Rabi minimum found");
}

RamseyTrace apply_dephasing(const RamseyTrace& trace, double t2_star, EnvelopeShape shape) {
  trace.validate();
  if (!(t2_star > 0.0)) throw InvalidInput("t2_star must be > 0");
  RamseyTrace out = trace;
  if (trace.signal.empty()) return out;
  double mean = 0.0;
  for (double v : trace.signal) mean += v;
  mean /= static_cast<double>(trace.signal.size());
  for (std::size_t i = 0; i < out.signal.size(); ++i) {
    out.signal[i] = mean + (trace.signal[i] - mean) * envelope_factor(trace.tau[i], t2_star, shape);
  }
  out.envelope = DephasingEnvelope{t2_star, shape};
  return out;
}

std::vector<double> linspace(double start, double stop, int n) {
  if (n < 1) throw InvalidInput("linspace needs at least one point");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = start;
    return out;
  }
  const double step = (stop - start) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = start + step * i;
  return out;
}

}  // namespace nvbeat
