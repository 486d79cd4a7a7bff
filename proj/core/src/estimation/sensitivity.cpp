#include "nvbeat/estimation/sensitivity.hpp"

#include <cmath>
#include <sstream>

#include "nvbeat/errors.hpp"
#include "nvbeat/spin_core.hpp"

namespace nvbeat {

namespace {

// Index of the state in `eig` that best overlaps `v`. Requires a clear winner.
int match_state(const Eigensystem& eig, const Eigen::Ref<const Vector6cd>& v, int reference) {
  int best = -1;
  double o1 = -1.0, o2 = -1.0;
  for (int k = 0; k < 6; ++k) {
    const double o = std::norm(eig.vectors.col(k).dot(v));
    if (o > o1) {
      o2 = o1;
      o1 = o;
      best = k;
    } else if (o > o2) {
      o2 = o;
    }
  }
  if (o1 < 0.5 || o2 > 0.8 * o1) {
    std::ostringstream msg;
    msg << "transition matching failed: state " << reference << " overlaps " << o1 << " and " << o2
        << " with the perturbed eigenstates; reduce the step";
    throw NumericalError(msg.str());
  }
  return best;
}

std::array<double, 4> matched_lines(const Eigensystem& base, const std::vector<TransitionLine>& lines,
                                    const SystemParams& params, const FieldOrientation& field) {
  const Eigensystem eig = solve(params, field);
  std::array<double, 4> out{};
  for (std::size_t k = 0; k < 4; ++k) {
    const int from = match_state(eig, base.vectors.col(lines[k].from_state), lines[k].from_state);
    const int to = match_state(eig, base.vectors.col(lines[k].to_state), lines[k].to_state);
    if (from == to) throw NumericalError("transition matching failed: both ends map to one state");
    out[k] = std::abs(eig.values[static_cast<std::size_t>(to)] - eig.values[static_cast<std::size_t>(from)]);
  }
  return out;
}

}  // namespace

SensitivityReport sensitivity_c(const SystemParams& params, const FieldOrientation& field, ParamId which,
                                double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidInput("sensitivity step must be > 0");
  if (which == ParamId::b || which == ParamId::phi_offset) {
    throw InvalidInput(std::string("sensitivity is defined for tensor components, not ") + to_string(which));
  }
  params.validate();
  const Eigensystem base = solve(params, field);
  const auto lines = main_transitions(base);

  auto shifted = [&](double delta) {
    SystemParams p = params;
    FitParameters f = FitParameters::from(p.tensor, 0.0);
    f.set(which, f.get(which) + delta);
    p.tensor = f.tensor();
    return matched_lines(base, lines, p, field);
  };
  const auto up = shifted(step);
  const auto dn = shifted(-step);

  SensitivityReport r;
  r.param = which;
  r.step = step;
  for (std::size_t k = 0; k < 4; ++k) {
    r.slopes[k] = (up[k] - dn[k]) / (2.0 * step);
    r.c_value += std::abs(r.slopes[k]) / 4.0;
  }
  return r;
}

double precision_propagation(double delta_omega, double c) {
  if (!(c > 0.0)) throw InvalidInput("parameter unobservable (c <= 0)");
  if (!(delta_omega >= 0.0)) throw InvalidInput("frequency precision must be >= 0");
  return delta_omega / c;
}

}  // namespace nvbeat
