#include "nvbeat/estimation/forward_model.hpp"

#include <cmath>

#include "nvbeat/errors.hpp"
#include "nvbeat/parallel.hpp"
#include "nvbeat/spin_core.hpp"

namespace nvbeat {

const char* to_string(ParamId id) {
  switch (id) {
    case ParamId::a_xx: return "a_xx";
    case ParamId::a_yy: return "a_yy";
    case ParamId::a_zz: return "a_zz";
    case ParamId::a: return "a";
    case ParamId::b: return "b";
    case ParamId::phi_offset: return "phi_offset";
  }
  return "?";
}

ParamId param_id_from_string(const std::string& text) {
  for (ParamId id : kAllParams) {
    if (text == to_string(id)) return id;
  }
  throw InvalidInput("unknown parameter '" + text + "' (expected a_xx, a_yy, a_zz, a, b or phi_offset)");
}

double FitParameters::get(ParamId id) const {
  switch (id) {
    case ParamId::a_xx: return a_xx;
    case ParamId::a_yy: return a_yy;
    case ParamId::a_zz: return a_zz;
    case ParamId::a: return a;
    case ParamId::b: return b;
    case ParamId::phi_offset: return phi_offset;
  }
  return 0.0;
}

void FitParameters::set(ParamId id, double value) {
  switch (id) {
    case ParamId::a_xx: a_xx = value; break;
    case ParamId::a_yy: a_yy = value; break;
    case ParamId::a_zz: a_zz = value; break;
    case ParamId::a: a = value; break;
    case ParamId::b: b = value; break;
    case ParamId::phi_offset: phi_offset = value; break;
  }
}

FitParameters FitParameters::from(const HyperfineTensor& t, double b_gauss, double phi_offset_deg) {
  return {t.a_xx, t.a_yy, t.a_zz, t.a, b_gauss, phi_offset_deg};
}

double zq_amplitude(const SystemParams& params, const FieldOrientation& field) {
  const Eigensystem eig = solve(params, field);
  const LambdaAmplitudes l = lambda_transition_amplitudes(eig, params, field);
  const double s = l.omega_plus * l.omega_plus + l.omega_minus * l.omega_minus;
  if (!(s > 0.0)) return 0.0;
  const double r = l.omega_plus * l.omega_minus / s;
  return r * r;
}

ForwardModel::ForwardModel(SystemParams base, ScanDataset dataset)
    : base_(std::move(base)), dataset_(std::move(dataset)) {
  base_.validate();
  dataset_.validate();
  if (dataset_.frame != Frame::nv) throw InvalidInput("forward model expects NV-frame angles");
  if (!dataset_.points.empty() && dataset_.points.front().b_gauss > 0.0) b_ref_ = dataset_.points.front().b_gauss;
}

namespace {

struct PointSetup {
  SystemParams params;
  FieldOrientation field;
  double b_scale = 1.0;  ///< dB_point / dB_fit
};

PointSetup setup(const SystemParams& base, const FitParameters& p, const ScanPoint& pt, double b_ref) {
  PointSetup s;
  s.params = base;
  s.params.tensor = p.tensor();
  s.b_scale = pt.b_gauss / b_ref;
  s.field = FieldOrientation::nv(pt.b_gauss * p.b / b_ref, pt.theta_deg, pt.phi_deg + p.phi_offset);
  return s;
}

double frequency_from(const Eigensystem& eig, const ScanPoint& pt, int& upper, int& lower) {
  if (pt.kind == ObservableKind::sq_frequency) {
    const auto lines = main_transitions(eig);
    const auto& line = lines[static_cast<std::size_t>(*pt.transition_index)];
    upper = line.to_state;
    lower = line.from_state;
    if (eig.values[static_cast<std::size_t>(upper)] < eig.values[static_cast<std::size_t>(lower)]) {
      std::swap(upper, lower);
    }
  } else {
    const auto ground = eig.states(Manifold::ms0);
    if (ground.size() != 2) throw NumericalError("ground manifold not resolved");
    lower = ground[0];
    upper = ground[1];
  }
  return eig.values[static_cast<std::size_t>(upper)] - eig.values[static_cast<std::size_t>(lower)];
}

double fd_step(ParamId id) {
  switch (id) {
    case ParamId::b: return 1e-4;
    case ParamId::phi_offset: return 1e-3;
    default: return 1e-3;
  }
}

}  // namespace

double ForwardModel::value(const FitParameters& p, std::size_t i) const {
  const ScanPoint& pt = dataset_.points.at(i);
  const PointSetup s = setup(base_, p, pt, b_ref_);
  if (pt.kind == ObservableKind::zq_amplitude) return zq_amplitude(s.params, s.field);
  int upper = 0, lower = 0;
  return frequency_from(solve(s.params, s.field), pt, upper, lower);
}

void ForwardModel::value_and_gradient(const FitParameters& p, std::size_t i, double& value,
                                      std::array<double, kParamCount>& grad) const {
  const ScanPoint& pt = dataset_.points.at(i);
  if (pt.kind == ObservableKind::zq_amplitude) {
    value = this->value(p, i);
    for (ParamId id : kAllParams) {
      const double h = fd_step(id);
      FitParameters up = p, dn = p;
      up.set(id, p.get(id) + h);
      dn.set(id, p.get(id) - h);
      grad[static_cast<std::size_t>(id)] = (this->value(up, i) - this->value(dn, i)) / (2.0 * h);
    }
    return;
  }

  const PointSetup s = setup(base_, p, pt, b_ref_);
  const Eigensystem eig = solve(s.params, s.field);
  int upper = 0, lower = 0;
  value = frequency_from(eig, pt, upper, lower);

  const HamiltonianTerms& t = hamiltonian_terms();
  const Eigen::Vector3d n = s.field.direction();
  const double th = deg_to_rad(s.field.theta());
  const double ph = deg_to_rad(s.field.phi());
  const Eigen::Vector3d dn(-std::sin(th) * std::sin(ph), std::sin(th) * std::cos(ph), 0.0);
  const double gn = (base_.flip_nuclear_zeeman ? -1.0 : 1.0) * base_.gamma_n;
  auto zeeman = [&](const Eigen::Vector3d& u) -> Matrix6cd {
    return base_.gamma_e * (u.x() * t.sx + u.y() * t.sy + u.z() * t.sz) +
           gn * (u.x() * t.ix + u.y() * t.iy + u.z() * t.iz);
  };

  const std::array<Matrix6cd, kParamCount> dh{
      t.hf_xx, t.hf_yy, t.hf_zz, t.hf_a, s.b_scale * zeeman(n), s.field.b() * kDegree * zeeman(dn)};
  const auto vu = eig.vectors.col(upper);
  const auto vl = eig.vectors.col(lower);
  for (std::size_t k = 0; k < kParamCount; ++k) {
    grad[k] = (vu.dot(dh[k] * vu) - vl.dot(dh[k] * vl)).real();
  }
}

std::vector<double> ForwardModel::values(const FitParameters& p, int threads) const {
  std::vector<double> out(dataset_.points.size());
  parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = value(p, i); });
  return out;
}

}  // namespace nvbeat
