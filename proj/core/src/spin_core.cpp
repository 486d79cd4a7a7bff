#include "nvbeat/spin_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unsupported/Eigen/KroneckerProduct>

#include "nvbeat/errors.hpp"

namespace nvbeat {

namespace {

constexpr cd kI{0.0, 1.0};

Matrix6cd kron6(const Eigen::MatrixXcd& electron, const Eigen::MatrixXcd& nuclear) {
  Matrix6cd out = Eigen::kroneckerProduct(electron, nuclear).eval();
  return out;
}

// Projector weight of column `v` onto the m_S subspace with index ms_index.
double manifold_weight(const Vector6cd& v, int ms_index) {
  return std::norm(v(2 * ms_index)) + std::norm(v(2 * ms_index + 1));
}

}  // namespace

SpinOperators spin_matrices(double s) {
  if (s != 0.5 && s != 1.0) {
    throw InvalidInput("unsupported spin");
  }
  const int dim = static_cast<int>(std::lround(2.0 * s)) + 1;
  Eigen::MatrixXcd raise = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd sz = Eigen::MatrixXcd::Zero(dim, dim);
  // Row/column k holds m = s - k.
  for (int k = 0; k < dim; ++k) {
    const double m = s - k;
    sz(k, k) = m;
    if (k > 0) raise(k - 1, k) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
  }
  const Eigen::MatrixXcd lower = raise.adjoint();
  SpinOperators ops;
  ops.sx = (raise + lower) / 2.0;
  ops.sy = (raise - lower) / (2.0 * kI);
  ops.sz = sz;
  return ops;
}

const HamiltonianTerms& hamiltonian_terms() {
  static const HamiltonianTerms terms = [] {
    const SpinOperators s = spin_matrices(1.0);
    const SpinOperators i = spin_matrices(0.5);
    const Eigen::MatrixXcd e3 = Eigen::MatrixXcd::Identity(3, 3);
    const Eigen::MatrixXcd e2 = Eigen::MatrixXcd::Identity(2, 2);
    HamiltonianTerms t;
    t.sx = kron6(s.sx, e2);
    t.sy = kron6(s.sy, e2);
    t.sz = kron6(s.sz, e2);
    t.ix = kron6(e3, i.sx);
    t.iy = kron6(e3, i.sy);
    t.iz = kron6(e3, i.sz);
    t.sz_squared = kron6(s.sz * s.sz, e2);
    t.hf_xx = kron6(s.sx, i.sx);
    t.hf_yy = kron6(s.sy, i.sy);
    t.hf_zz = kron6(s.sz, i.sz);
    t.hf_a = kron6(s.sz, i.sx) + kron6(s.sx, i.sz);
    return t;
  }();
  return terms;
}

Matrix6cd build_hamiltonian(const SystemParams& params, const FieldOrientation& field) {
  if (field.frame() != Frame::nv) {
    throw InvalidInput("build_hamiltonian requires an NV-frame field; convert with lab_to_nv first");
  }
  params.validate();
  const HamiltonianTerms& t = hamiltonian_terms();
  const Eigen::Vector3d n = field.direction();
  const double be = params.gamma_e * field.b();
  const double bn = (params.flip_nuclear_zeeman ? -1.0 : 1.0) * params.gamma_n * field.b();
  const HyperfineTensor& a = params.tensor;

  Matrix6cd h = params.d * t.sz_squared;
  h += be * (n.x() * t.sx + n.y() * t.sy + n.z() * t.sz);
  h += bn * (n.x() * t.ix + n.y() * t.iy + n.z() * t.iz);
  h += a.a_xx * t.hf_xx + a.a_yy * t.hf_yy + a.a_zz * t.hf_zz + a.a * t.hf_a;
  // Remove rounding asymmetry so downstream checks see an exactly Hermitian matrix.
  return (0.5 * (h + h.adjoint())).eval();
}

const char* to_string(Manifold m) {
  switch (m) {
    case Manifold::ms0: return "ms0";
    case Manifold::ms_minus: return "ms_minus";
    case Manifold::ms_plus: return "ms_plus";
  }
  return "?";
}

std::vector<int> Eigensystem::states(Manifold m) const {
  std::vector<int> out;
  for (int k = 0; k < 6; ++k) {
    if (manifold[static_cast<std::size_t>(k)] == m) out.push_back(k);
  }
  return out;
}

Eigensystem eigensystem(const Matrix6cd& h) {
  const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-9)) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian (max |H - H^dagger| = " << asym << ")";
    throw InvalidInput(msg.str());
  }
  const Matrix6cd hs = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix6cd> solver(hs);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed");

  Eigensystem out;
  Eigen::Matrix<double, 6, 1> values = solver.eigenvalues();
  Matrix6cd vectors = solver.eigenvectors();

  // Resolve exact degeneracies with a fixed secondary operator.
  const HamiltonianTerms& t = hamiltonian_terms();
  const Matrix6cd tiebreak = t.sz + 0.1 * t.iz;
  const double tol = 1e-9 * std::max(1.0, values.cwiseAbs().maxCoeff());
  for (int start = 0; start < 6;) {
    int end = start + 1;
    while (end < 6 && values(end) - values(end - 1) < tol) ++end;
    const int size = end - start;
    if (size > 1) {
      const Eigen::MatrixXcd block = vectors.middleCols(start, size);
      const Eigen::MatrixXcd projected = block.adjoint() * tiebreak * block;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> inner(0.5 * (projected + projected.adjoint()));
      vectors.middleCols(start, size) = block * inner.eigenvectors();
    }
    start = end;
  }

  std::array<bool, 6> ambiguous{};
  for (int k = 0; k < 6; ++k) {
    auto col = vectors.col(k);
    const double max_abs = col.cwiseAbs().maxCoeff();
    int pivot = 0;
    for (int r = 0; r < 6; ++r) {
      if (std::abs(col(r)) >= max_abs - 1e-12) {
        pivot = r;
        break;
      }
    }
    const cd phase = std::conj(col(pivot)) / std::abs(col(pivot));
    col *= phase;
    col(pivot) = std::abs(col(pivot));

    const Vector6cd v = col;
    const double w_plus = manifold_weight(v, 0);
    const double w_zero = manifold_weight(v, 1);
    const double w_minus = manifold_weight(v, 2);
    out.values[static_cast<std::size_t>(k)] = values(k);
    if (w_zero >= 0.6) {
      out.manifold[static_cast<std::size_t>(k)] = Manifold::ms0;
    } else if (w_plus >= 0.6) {
      out.manifold[static_cast<std::size_t>(k)] = Manifold::ms_plus;
    } else if (w_minus >= 0.6) {
      out.manifold[static_cast<std::size_t>(k)] = Manifold::ms_minus;
    } else if (w_plus + w_minus >= 0.6) {
      // |m_S| = 1 but the sign is mixed (transverse field): resolved by energy below.
      ambiguous[static_cast<std::size_t>(k)] = true;
    } else {
      std::ostringstream msg;
      msg << "manifold labels unresolved: state " << k << " (E = " << values(k)
          << " MHz) has m_S=0 weight " << w_zero << " and |m_S|=1 weight " << (w_plus + w_minus)
          << ", both < 0.6";
      throw NumericalError(msg.str());
    }
  }
  // Ties between m_S=+1 and m_S=-1 follow ascending energy: the lower two
  // |m_S|=1 states are labelled ms_minus.
  int rank = 0;
  for (int k = 0; k < 6; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    if (out.manifold[uk] == Manifold::ms0 && !ambiguous[uk]) continue;
    if (ambiguous[uk]) out.manifold[uk] = rank < 2 ? Manifold::ms_minus : Manifold::ms_plus;
    ++rank;
  }
  out.vectors = vectors;
  return out;
}

Eigensystem solve(const SystemParams& params, const FieldOrientation& field) {
  return eigensystem(build_hamiltonian(params, field));
}

const Matrix6cd& electron_drive() { return hamiltonian_terms().sx; }

namespace {

void require_doublet(const std::vector<int>& states, const char* what) {
  if (states.size() != 2) {
    std::ostringstream msg;
    msg << what << " not resolved (found " << states.size() << " states, expected 2)";
    throw NumericalError(msg.str());
  }
}

TransitionLine make_line(const Eigensystem& eig, const Matrix6cd& drive, int from, int to) {
  TransitionLine line;
  line.from_state = from;
  line.to_state = to;
  line.frequency = std::abs(eig.values[static_cast<std::size_t>(to)] -
                            eig.values[static_cast<std::size_t>(from)]);
  const cd element = eig.vectors.col(to).dot(drive * eig.vectors.col(from));
  line.amplitude = std::norm(element);
  return line;
}

void sort_by_frequency(std::vector<TransitionLine>& lines) {
  std::stable_sort(lines.begin(), lines.end(),
                   [](const TransitionLine& x, const TransitionLine& y) { return x.frequency < y.frequency; });
}

}  // namespace

std::vector<TransitionLine> single_quantum_transitions(const Eigensystem& eig, const Matrix6cd& drive) {
  std::vector<TransitionLine> lines;
  for (int g : eig.states(Manifold::ms0)) {
    for (int e = 0; e < 6; ++e) {
      if (eig.manifold[static_cast<std::size_t>(e)] == Manifold::ms0) continue;
      lines.push_back(make_line(eig, drive, g, e));
    }
  }
  sort_by_frequency(lines);
  return lines;
}

std::vector<TransitionLine> main_transitions(const Eigensystem& eig, const Matrix6cd& drive) {
  const auto ground = eig.states(Manifold::ms0);
  const auto excited = eig.states(Manifold::ms_minus);
  require_doublet(ground, "ground manifold");
  require_doublet(excited, "m_S=-1 manifold");
  std::vector<TransitionLine> lines;
  for (int g : ground) {
    for (int e : excited) lines.push_back(make_line(eig, drive, g, e));
  }
  sort_by_frequency(lines);
  return lines;
}

double zero_quantum_splitting_exact(const Eigensystem& eig) {
  const auto ground = eig.states(Manifold::ms0);
  require_doublet(ground, "ground manifold");
  return eig.values[static_cast<std::size_t>(ground[1])] - eig.values[static_cast<std::size_t>(ground[0])];
}

NuclearExcitedStates nuclear_eigenstates_excited(const HyperfineTensor& tensor) {
  tensor.validate();
  if (tensor.a_zz == 0.0 && tensor.a == 0.0) {
    throw InvalidInput("quantization axis undefined (A_zz = a = 0)");
  }
  const double theta_prime = std::atan2(tensor.a, tensor.a_zz);
  const double c = std::cos(theta_prime / 2.0);
  const double s = std::sin(theta_prime / 2.0);
  NuclearExcitedStates out;
  out.theta_prime_deg = rad_to_deg(theta_prime);
  out.alpha_plus << c, s;
  out.alpha_minus << s, -c;
  return out;
}

ZeemanStates ground_zeeman_states(const FieldOrientation& field) {
  if (!(field.b() > 0.0)) throw InvalidInput("Zeeman axis undefined (b = 0)");
  const double half = deg_to_rad(field.theta()) / 2.0;
  const cd phase = std::polar(1.0, deg_to_rad(field.phi()));
  ZeemanStates out;
  out.beta_plus << std::cos(half), phase * std::sin(half);
  out.beta_minus << std::sin(half), -phase * std::cos(half);
  return out;
}

double LambdaAmplitudes::ratio() const {
  const double hi = std::max(omega_plus, omega_minus);
  const double lo = std::min(omega_plus, omega_minus);
  return hi > 0.0 ? lo / hi : 1.0;
}

LambdaAmplitudes lambda_transition_amplitudes(const Eigensystem& eig, const SystemParams& params,
                                              const FieldOrientation& field, const Matrix6cd& drive) {
  const auto ground = eig.states(Manifold::ms0);
  const auto excited = eig.states(Manifold::ms_minus);
  require_doublet(ground, "ground manifold");
  require_doublet(excited, "m_S=-1 manifold");

  const NuclearExcitedStates alpha = nuclear_eigenstates_excited(params.tensor);
  Vector6cd minus_alpha = Vector6cd::Zero();
  minus_alpha.segment<2>(4) = alpha.alpha_minus;
  const double ov0 = std::norm(minus_alpha.dot(eig.vectors.col(excited[0])));
  const double ov1 = std::norm(minus_alpha.dot(eig.vectors.col(excited[1])));
  if (std::abs(ov0 - ov1) < 0.05 * std::max(ov0, ov1)) {
    std::ostringstream msg;
    msg << "ambiguous excited-state identification: overlaps with |-1>|alpha-> are " << ov0
        << " (E = " << eig.values[static_cast<std::size_t>(excited[0])] << " MHz) and " << ov1
        << " (E = " << eig.values[static_cast<std::size_t>(excited[1])] << " MHz)";
    throw NumericalError(msg.str());
  }
  const int e = ov0 > ov1 ? excited[0] : excited[1];

  int g_plus = ground[1];
  int g_minus = ground[0];
  if (field.b() > 0.0) {
    const ZeemanStates beta = ground_zeeman_states(field);
    Vector6cd zero_beta = Vector6cd::Zero();
    zero_beta.segment<2>(2) = beta.beta_plus;
    const double w0 = std::norm(zero_beta.dot(eig.vectors.col(ground[0])));
    const double w1 = std::norm(zero_beta.dot(eig.vectors.col(ground[1])));
    if (w0 > w1 + 1e-9) {
      g_plus = ground[0];
      g_minus = ground[1];
    }
  }

  LambdaAmplitudes out;
  out.excited = e;
  out.ground_plus = g_plus;
  out.ground_minus = g_minus;
  out.element_plus = eig.vectors.col(e).dot(drive * eig.vectors.col(g_plus));
  out.element_minus = eig.vectors.col(e).dot(drive * eig.vectors.col(g_minus));
  out.omega_plus = std::abs(out.element_plus);
  out.omega_minus = std::abs(out.element_minus);
  return out;
}

}  // namespace nvbeat
