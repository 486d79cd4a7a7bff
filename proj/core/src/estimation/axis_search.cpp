#include "nvbeat/estimation/axis_search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nvbeat/errors.hpp"
#include "nvbeat/parallel.hpp"
#include "nvbeat/spin_core.hpp"

namespace nvbeat {

namespace {

[[noreturn]] void not_bracketed(const std::string& detail) {
  throw NumericalError("extremum not bracketed (" + detail + ")");
}

AxisMinimum quadratic_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& sigma) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const double xbar = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double u = x[ui] - xbar;
    a(i, 0) = 1.0 / sigma[ui];
    a(i, 1) = u / sigma[ui];
    a(i, 2) = u * u / sigma[ui];
    b(i) = y[ui] / sigma[ui];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  const double chi2 = (a * c - b).squaredNorm();
  const int dof = static_cast<int>(n) - 3;
  const double scale = (dof > 0 && chi2 / dof > 1.0) ? chi2 / dof : 1.0;
  const Eigen::Matrix3d cov = (a.transpose() * a).inverse() * scale;

  if (!(c(2) > 0.0)) not_bracketed("fitted curvature is not positive");
  AxisMinimum out;
  const double shift = -c(1) / (2.0 * c(2));
  out.angle = xbar + shift;
  const Eigen::Vector3d g(0.0, -1.0 / (2.0 * c(2)), c(1) / (2.0 * c(2) * c(2)));
  out.uncertainty = std::sqrt(std::max(0.0, g.dot(cov * g)));
  out.curvature = c(2);
  out.v0 = c(0) - c(1) * c(1) / (4.0 * c(2));
  out.chi2 = chi2;
  return out;
}

AxisMinimum quartic_fit(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& sigma, const AxisMinimum& start) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::Vector4d p(start.v0, start.curvature, start.angle, 0.0);  // v0, k, x0, q
  auto residuals = [&](const Eigen::Vector4d& q, Eigen::VectorXd& r, Eigen::MatrixXd* j) {
    r.resize(n);
    if (j) j->resize(n, 4);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const double d = x[ui] - q(2);
      const double d2 = d * d;
      r(i) = (y[ui] - (q(0) + q(1) * d2 + q(3) * d2 * d2)) / sigma[ui];
      if (j) {
        (*j)(i, 0) = 1.0 / sigma[ui];
        (*j)(i, 1) = d2 / sigma[ui];
        (*j)(i, 2) = (-2.0 * q(1) * d - 4.0 * q(3) * d2 * d) / sigma[ui];
        (*j)(i, 3) = d2 * d2 / sigma[ui];
      }
    }
  };
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  residuals(p, r, &j);
  double chi2 = r.squaredNorm();
  for (int it = 0; it < 100; ++it) {
    const Eigen::Vector4d step = j.colPivHouseholderQr().solve(r);
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h < 30; ++h, t *= 0.5) {
      Eigen::VectorXd rt;
      residuals(p + t * step, rt, nullptr);
      if (rt.squaredNorm() < chi2) {
        p += t * step;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double prev = chi2;
    residuals(p, r, &j);
    chi2 = r.squaredNorm();
    if (prev - chi2 <= 1e-12 * std::max(prev, 1e-300)) break;
  }
  const int dof = static_cast<int>(n) - 4;
  const double scale = (dof > 0 && chi2 / dof > 1.0) ? chi2 / dof : 1.0;
  const Eigen::Matrix4d cov = (j.transpose() * j).inverse() * scale;
  AxisMinimum out;
  out.v0 = p(0);
  out.curvature = p(1);
  out.angle = p(2);
  out.quartic = p(3);
  out.uncertainty = std::sqrt(std::max(0.0, cov(2, 2)));
  out.chi2 = chi2;
  return out;
}

}  // namespace

AxisMinimum find_axis_minimum(const std::vector<double>& x_in, const std::vector<double>& y_in,
                              const std::vector<double>& sigma_in, AxisModel model) {
  if (x_in.size() != y_in.size() || x_in.size() != sigma_in.size()) {
    throw InvalidInput("find_axis_minimum: x, y and sigma lengths differ");
  }
  if (x_in.size() < 5) not_bracketed("need at least 5 points, got " + std::to_string(x_in.size()));
  std::vector<std::size_t> order(x_in.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return x_in[l] < x_in[r]; });
  std::vector<double> x, y, sigma;
  for (std::size_t i : order) {
    if (!(sigma_in[i] > 0.0)) throw InvalidInput("find_axis_minimum: sigma must be > 0");
    x.push_back(x_in[i]);
    y.push_back(y_in[i]);
    sigma.push_back(sigma_in[i]);
  }
  const auto imin = static_cast<std::size_t>(std::min_element(y.begin(), y.end()) - y.begin());
  if (imin == 0 || imin + 1 == y.size()) not_bracketed("smallest sample lies on the edge of the scan");

  AxisMinimum out = quadratic_fit(x, y, sigma);
  if (model == AxisModel::quartic) {
    if (x.size() < 5) not_bracketed("quartic model needs at least 5 points");
    out = quartic_fit(x, y, sigma, out);
  }
  if (!(out.angle >= x.front() && out.angle <= x.back())) {
    std::ostringstream msg;
    msg << "fitted vertex " << out.angle << " lies outside [" << x.front() << ", " << x.back() << "]";
    not_bracketed(msg.str());
  }
  return out;
}

AxisMinimum find_axis_minimum(const ScanDataset& scan, SweepAxis axis, AxisModel model) {
  scan.validate();
  if (scan.points.empty()) throw InvalidInput("find_axis_minimum: empty scan");
  const ScanPoint& first = scan.points.front();
  std::vector<double> x, y, s;
  for (const ScanPoint& p : scan.points) {
    if (p.kind != first.kind || p.transition_index != first.transition_index) {
      throw InvalidInput("find_axis_minimum: scan mixes observables");
    }
    const double fixed = axis == SweepAxis::theta ? p.phi_deg - first.phi_deg : p.theta_deg - first.theta_deg;
    if (std::abs(fixed) > 1e-9) throw InvalidInput("find_axis_minimum: scan varies more than one angle");
    x.push_back(axis == SweepAxis::theta ? p.theta_deg : p.phi_deg);
    y.push_back(p.value);
    s.push_back(p.sigma);
  }
  return find_axis_minimum(x, y, s, model);
}

double derivative_zero_crossing(const std::vector<double>& x_in, const std::vector<double>& y_in) {
  if (x_in.size() != y_in.size()) throw InvalidInput("derivative_zero_crossing: lengths differ");
  if (x_in.size() < 3) not_bracketed("need at least 3 points");
  std::vector<std::size_t> order(x_in.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return x_in[l] < x_in[r]; });
  std::vector<double> mid, slope;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    const double x0 = x_in[order[k]], x1 = x_in[order[k + 1]];
    if (!(x1 > x0)) throw InvalidInput("derivative_zero_crossing: duplicate x values");
    mid.push_back(0.5 * (x0 + x1));
    slope.push_back((y_in[order[k + 1]] - y_in[order[k]]) / (x1 - x0));
  }
  for (std::size_t k = 0; k + 1 < slope.size(); ++k) {
    if (slope[k] < 0.0 && slope[k + 1] >= 0.0) {
      return mid[k] + (mid[k + 1] - mid[k]) * (-slope[k]) / (slope[k + 1] - slope[k]);
    }
  }
  not_bracketed("derivative never crosses zero from below");
}

double lambda_ratio_at(const SystemParams& params, const FieldOrientation& field) {
  try {
    const Eigensystem eig = solve(params, field);
    const LambdaAmplitudes l = lambda_transition_amplitudes(eig, params, field);
    // Near the transverse plane the m_S = ±1 states mix and the Λ picture no
    // longer applies; spurious zeros of the ratio appear there.
    auto weight = [&](int state, int ms_index) {
      const auto v = eig.vectors.col(state);
      return std::norm(v(2 * ms_index)) + std::norm(v(2 * ms_index + 1));
    };
    if (weight(l.excited, 2) < kLambdaPurity || weight(l.ground_plus, 1) < kLambdaPurity ||
        weight(l.ground_minus, 1) < kLambdaPurity) {
      return 1.0;
    }
    return l.ratio();
  } catch (const Error&) {
    return 1.0;
  }
}

namespace {

template <typename F>
double golden_section(F&& f, double lo, double hi, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - g * (hi - lo); f1 = f(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + g * (hi - lo); f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SingleTransitionAxis find_single_transition_axis(const SystemParams& params, double b_gauss,
                                                 const AxisSearchOptions& options) {
  if (!(b_gauss > 0.0)) throw InvalidInput("single-transition axis search needs b > 0");
  if (!(options.grid_step > 0.0) || !(options.tolerance > 0.0)) throw InvalidInput("grid_step and tolerance must be > 0");
  params.validate();

  auto ratio = [&](double th, double ph) {
    return lambda_ratio_at(params, FieldOrientation::nv(b_gauss, std::clamp(th, 0.0, 180.0), ph));
  };

  const int nt = static_cast<int>(std::floor(options.theta_max / options.grid_step + 1e-9)) + 1;
  const int np = static_cast<int>(std::floor((options.phi_max - options.phi_min) / options.grid_step + 1e-9)) + 1;
  std::vector<double> grid(static_cast<std::size_t>(nt * np));
  parallel_for(grid.size(), options.threads, [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / np;
    const int j = static_cast<int>(idx) % np;
    grid[idx] = ratio(i * options.grid_step, options.phi_min + j * options.grid_step);
  });
  const auto best = static_cast<int>(std::min_element(grid.begin(), grid.end()) - grid.begin());
  double th = (best / np) * options.grid_step;
  double ph = options.phi_min + (best % np) * options.grid_step;

  // Alternating golden-section line searches around the best grid node.
  const double span = options.grid_step;
  for (int round = 0; round < 30; ++round) {
    const double th_new = golden_section([&](double t) { return ratio(t, ph); },
                                         std::max(0.0, th - span), std::min(options.theta_max, th + span),
                                         0.5 * options.tolerance);
    const double ph_new = golden_section([&](double p) { return ratio(th_new, p); },
                                         std::max(options.phi_min, ph - span), std::min(options.phi_max, ph + span),
                                         0.5 * options.tolerance);
    const bool done = std::abs(th_new - th) < options.tolerance && std::abs(ph_new - ph) < options.tolerance;
    th = th_new;
    ph = ph_new;
    if (done) break;
  }
  // A grid node can beat the refinement when the optimum sits on the boundary.
  if (grid[static_cast<std::size_t>(best)] < ratio(th, ph)) {
    th = (best / np) * options.grid_step;
    ph = options.phi_min + (best % np) * options.grid_step;
  }

  SingleTransitionAxis out;
  out.theta = th;
  out.phi = th < options.tolerance ? 0.0 : wrap_signed_degrees(ph);  // φ is moot on the axis
  out.amplitude_ratio = ratio(th, ph);
  if (!(out.amplitude_ratio < options.accept_ratio)) {
    std::ostringstream msg;
    msg << "no single-transition axis in range (best amplitude ratio " << out.amplitude_ratio << " at theta="
        << th << ", phi=" << ph << ")";
    throw NumericalError(msg.str());
  }
  return out;
}

}  // namespace nvbeat
