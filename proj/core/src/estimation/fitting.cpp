#include "nvbeat/estimation/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "nvbeat/errors.hpp"
#include "nvbeat/parallel.hpp"

namespace nvbeat {

namespace {

struct Evaluation {
  Eigen::VectorXd r;  // whitened residuals (value − model) / σ
  Eigen::MatrixXd j;  // whitened model Jacobian over the free parameters
  std::vector<double> model;
  double chi2 = std::numeric_limits<double>::infinity();
};

class Problem {
 public:
  Problem(const SystemParams& base, const ScanDataset& dataset, std::vector<ParamId> free, int threads)
      : model_(base, dataset), free_(std::move(free)), threads_(threads) {}

  Evaluation evaluate(const FitParameters& p, bool with_jacobian) const {
    const auto& pts = model_.dataset().points;
    const auto n = static_cast<Eigen::Index>(pts.size());
    Evaluation ev;
    ev.r.resize(n);
    ev.model.resize(pts.size());
    if (with_jacobian) ev.j.resize(n, static_cast<Eigen::Index>(free_.size()));
    parallel_for(pts.size(), threads_, [&](std::size_t i) {
      const double sigma = pts[i].sigma;
      double m = 0.0;
      if (with_jacobian) {
        std::array<double, kParamCount> grad{};
        model_.value_and_gradient(p, i, m, grad);
        for (std::size_t k = 0; k < free_.size(); ++k) {
          ev.j(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
              grad[static_cast<std::size_t>(free_[k])] / sigma;
        }
      } else {
        m = model_.value(p, i);
      }
      ev.model[i] = m;
      ev.r(static_cast<Eigen::Index>(i)) = (pts[i].value - m) / sigma;
    });
    ev.chi2 = ev.r.squaredNorm();
    return ev;
  }

  /// χ² at p, or +inf when the model cannot be evaluated there.
  double chi2_or_inf(const FitParameters& p) const {
    try {
      return evaluate(p, false).chi2;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  }

  const std::vector<ParamId>& free() const { return free_; }

 private:
  ForwardModel model_;
  std::vector<ParamId> free_;
  int threads_;
};

std::string describe_direction(const Eigen::VectorXd& v, const std::vector<ParamId>& free) {
  std::vector<std::size_t> order(free.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return std::abs(v(static_cast<Eigen::Index>(l))) > std::abs(v(static_cast<Eigen::Index>(r)));
  });
  // Sign convention: the largest component is positive.
  const double sign = v(static_cast<Eigen::Index>(order.front())) < 0.0 ? -1.0 : 1.0;
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(3);
  bool first = true;
  for (std::size_t k : order) {
    const double c = sign * v(static_cast<Eigen::Index>(k));
    if (std::abs(c) < 0.05) continue;
    if (!first) out << (c < 0.0 ? " - " : " + ");
    else if (c < 0.0) out << "-";
    out << std::abs(c) << "*" << to_string(free[k]);
    first = false;
  }
  return out.str();
}

void check_identifiable(const Eigen::MatrixXd& j, const std::vector<ParamId>& free, double limit) {
  const Eigen::MatrixXd jtj = j.transpose() * j;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jtj);
  const double lmin = solver.eigenvalues()(0);
  const double lmax = solver.eigenvalues()(solver.eigenvalues().size() - 1);
  const double sigma_dir = lmin > 0.0 ? 1.0 / std::sqrt(lmin) : std::numeric_limits<double>::infinity();
  if (sigma_dir > limit || !(lmin > 1e-14 * lmax)) {
    std::ostringstream msg;
    msg << "degenerate parameter direction: " << describe_direction(solver.eigenvectors().col(0), free)
        << " (1 sigma along it ";
    if (std::isfinite(sigma_dir)) msg << "~" << sigma_dir; else msg << "unbounded";
    msg << "; fix one of these parameters or add data that constrains it)";
    throw NumericalError(msg.str());
  }
}

/// Gauss–Newton step and the scaled gradient, via SVD of the column-scaled Jacobian.
void gauss_newton(const Evaluation& ev, Eigen::VectorXd& step, double& scaled_gradient) {
  const Eigen::Index m = ev.j.cols();
  Eigen::VectorXd scale(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double nrm = ev.j.col(k).norm();
    scale(k) = nrm > 0.0 ? nrm : 1.0;
  }
  const Eigen::MatrixXd js = ev.j * scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(js, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-13);
  step = svd.solve(ev.r).cwiseQuotient(scale);

  // Gradient component k times the standard error of parameter k.
  const Eigen::VectorXd g = ev.j.transpose() * ev.r;
  const Eigen::VectorXd sv = svd.singularValues();
  Eigen::VectorXd inv2 = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > 1e-13 * sv(0)) inv2(k) = 1.0 / (sv(k) * sv(k));
  }
  const Eigen::MatrixXd cov_scaled = svd.matrixV() * inv2.asDiagonal() * svd.matrixV().transpose();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double se = std::sqrt(std::max(0.0, cov_scaled(k, k))) / scale(k);
    acc += (g(k) * se) * (g(k) * se);
  }
  scaled_gradient = std::sqrt(acc);
}

FitParameters apply_step(const FitParameters& p, const std::vector<ParamId>& free, const Eigen::VectorXd& step,
                         double t) {
  FitParameters out = p;
  for (std::size_t k = 0; k < free.size(); ++k) {
    out.set(free[k], p.get(free[k]) + t * step(static_cast<Eigen::Index>(k)));
  }
  return out;
}

}  // namespace

FitResult fit_hyperfine(const SystemParams& base, const ScanDataset& dataset, const FitParameters& initial,
                        const FitOptions& options) {
  std::vector<ParamId> free;
  for (ParamId id : kAllParams) {
    if (!options.fixed.count(id)) free.push_back(id);
    if (!std::isfinite(initial.get(id))) throw InvalidInput(std::string("initial ") + to_string(id) + " is not finite");
  }
  if (free.empty()) throw InvalidInput("all parameters are fixed");
  if (dataset.points.size() < free.size()) {
    throw InvalidInput("dataset has " + std::to_string(dataset.points.size()) + " points for " +
                       std::to_string(free.size()) + " free parameters");
  }
  const Problem problem(base, dataset, free, options.threads);

  FitParameters p = initial;
  Evaluation ev = problem.evaluate(p, true);
  check_identifiable(ev.j, free, options.degeneracy_sigma);

  FitResult result;
  result.free = free;
  int streak = 0;
  bool criterion_met = false;
  double grad_norm = 0.0;
  int it = 0;
  for (it = 1; it <= options.max_iterations; ++it) {
    Eigen::VectorXd step;
    gauss_newton(ev, step, grad_norm);

    double t = 1.0;
    bool accepted = false;
    FitParameters trial;
    double trial_chi2 = 0.0;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      trial = apply_step(p, free, step, t);
      trial_chi2 = problem.chi2_or_inf(trial);
      if (trial_chi2 < ev.chi2) {
        accepted = true;
        break;
      }
    }
    double rel = 0.0;
    if (accepted) {
      rel = ev.chi2 > 0.0 ? (ev.chi2 - trial_chi2) / ev.chi2 : 0.0;
      p = trial;
      ev = problem.evaluate(p, true);
      Eigen::VectorXd next_step;
      gauss_newton(ev, next_step, grad_norm);
    }
    if (rel < options.relative_chi2_tolerance || grad_norm < options.gradient_tolerance) {
      ++streak;
    } else {
      streak = 0;
    }
    if (streak >= options.consecutive_iterations) {
      criterion_met = true;
      break;
    }
  }

  check_identifiable(ev.j, free, options.degeneracy_sigma);
  result.params = p;
  result.params.phi_offset = wrap_signed_degrees(p.phi_offset);
  result.n_iterations = std::min(it, options.max_iterations);
  result.chi2 = ev.chi2;
  result.dof = static_cast<int>(dataset.points.size()) - static_cast<int>(free.size());
  result.gradient_norm = grad_norm;
  result.converged = criterion_met && grad_norm < options.gradient_acceptance;
  result.model_values = ev.model;
  result.residuals.resize(dataset.points.size());
  for (std::size_t i = 0; i < dataset.points.size(); ++i) {
    result.residuals[i] = dataset.points[i].value - ev.model[i];
  }

  const Eigen::MatrixXd jtj = ev.j.transpose() * ev.j;
  result.covariance = jtj.ldlt().solve(Eigen::MatrixXd::Identity(jtj.rows(), jtj.cols()));
  const double red = result.reduced_chi2();
  result.covariance_scale = (result.dof > 0 && red > 1.0) ? red : 1.0;
  result.covariance *= result.covariance_scale;
  result.sigmas = FitParameters{};
  for (std::size_t k = 0; k < free.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    result.sigmas.set(free[k], std::sqrt(std::max(0.0, result.covariance(kk, kk))));
  }
  std::ostringstream msg;
  if (result.converged) {
    msg << "converged after " << result.n_iterations << " iterations";
  } else if (criterion_met) {
    msg << "stopped: chi2 stalled but scaled gradient " << grad_norm << " exceeds " << options.gradient_acceptance;
  } else {
    msg << "not converged within " << options.max_iterations << " iterations";
  }
  result.message = msg.str();
  return result;
}

BootstrapResult bootstrap_fit(const SystemParams& base, const ScanDataset& dataset, const FitResult& fit,
                              int n_resamples, std::uint64_t seed, const FitOptions& options) {
  if (n_resamples < 2) throw InvalidInput("bootstrap needs at least 2 resamples");
  const std::size_t n = dataset.points.size();
  std::vector<double> normalized(n);
  for (std::size_t i = 0; i < n; ++i) normalized[i] = fit.residuals[i] / dataset.points[i].sigma;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<FitParameters> samples;
  for (int r = 0; r < n_resamples; ++r) {
    ScanDataset resampled = dataset;
    for (std::size_t i = 0; i < n; ++i) {
      resampled.points[i].value = fit.model_values[i] + dataset.points[i].sigma * normalized[pick(rng)];
    }
    try {
      const FitResult f = fit_hyperfine(base, resampled, fit.params, options);
      if (f.converged) samples.push_back(f.params);
    } catch (const Error&) {
      // A resample that cannot be fitted is dropped and counted as a failure.
    }
  }
  BootstrapResult out;
  out.n_requested = n_resamples;
  out.n_success = static_cast<int>(samples.size());
  if (samples.size() < 2) return out;
  for (ParamId id : kAllParams) {
    double mean = 0.0;
    for (const auto& s : samples) mean += s.get(id);
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (const auto& s : samples) var += (s.get(id) - mean) * (s.get(id) - mean);
    var /= static_cast<double>(samples.size() - 1);
    out.mean.set(id, mean);
    out.sigmas.set(id, std::sqrt(var));
  }
  return out;
}

void write_residual_csv(std::ostream& out, const FitResult& result, const ScanDataset& dataset) {
  out << "index,kind,theta_deg,phi_deg,b_gauss,transition_index,value,sigma,model,residual,normalized_residual\n";
  for (std::size_t i = 0; i < dataset.points.size(); ++i) {
    const ScanPoint& p = dataset.points[i];
    out << i << ',' << to_string(p.kind) << ',' << format_double(p.theta_deg) << ',' << format_double(p.phi_deg)
        << ',' << format_double(p.b_gauss) << ',';
    if (p.transition_index) out << *p.transition_index;
    out << ',' << format_double(p.value) << ',' << format_double(p.sigma) << ','
        << format_double(result.model_values[i]) << ',' << format_double(result.residuals[i]) << ','
        << format_double(result.residuals[i] / p.sigma) << '\n';
  }
}

void write_fit_report(std::ostream& out, const FitResult& result, const ScanDataset& dataset,
                      const BootstrapResult* bootstrap) {
  out << "converged = " << (result.converged ? "true" : "false") << '\n';
  out << "message = " << result.message << '\n';
  out << "n_iterations = " << result.n_iterations << '\n';
  out << "n_points = " << dataset.points.size() << '\n';
  out << "chi2 = " << format_double(result.chi2) << '\n';
  out << "dof = " << result.dof << '\n';
  out << "reduced_chi2 = " << format_double(result.reduced_chi2()) << '\n';
  out << "covariance_scale = " << format_double(result.covariance_scale) << '\n';
  out << "gradient_norm = " << format_double(result.gradient_norm) << '\n';
  out << "free =";
  for (std::size_t k = 0; k < result.free.size(); ++k) out << (k ? "," : " ") << to_string(result.free[k]);
  out << '\n';
  for (ParamId id : kAllParams) {
    out << "param." << to_string(id) << " = " << format_double(result.params.get(id)) << '\n';
    out << "sigma." << to_string(id) << " = " << format_double(result.sigmas.get(id)) << '\n';
  }
  if (bootstrap) {
    out << "bootstrap.requested = " << bootstrap->n_requested << '\n';
    out << "bootstrap.succeeded = " << bootstrap->n_success << '\n';
    for (ParamId id : kAllParams) {
      out << "bootstrap.sigma." << to_string(id) << " = " << format_double(bootstrap->sigmas.get(id)) << '\n';
    }
  }
  out << "[residuals]\n";
  write_residual_csv(out, result, dataset);
}

}  // namespace nvbeat
