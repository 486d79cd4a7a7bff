#pragma once

// Weighted nonlinear least squares for the hyperfine tensor.

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nvbeat/estimation/forward_model.hpp"

namespace nvbeat {

struct FitOptions {
  std::set<ParamId> fixed;
  int max_iterations = 500;
  double relative_chi2_tolerance = 1e-10;
  /// Tolerance on the scaled gradient: |J^T r| with each component measured
  /// in units of that parameter's standard error (i.e. the Gauss–Newton step
  /// length in σ units).
  double gradient_tolerance = 1e-8;
  int consecutive_iterations = 3;
  /// A converged fit must also have its scaled gradient below this.
  double gradient_acceptance = 1e-3;
  /// A parameter combination whose 1σ exceeds this (in the parameters'
  /// natural units) is reported as a degenerate direction.
  double degeneracy_sigma = 1e4;
  int threads = 1;
};

struct FitResult {
  FitParameters params;
  FitParameters sigmas;  ///< 0 for fixed parameters
  std::vector<ParamId> free;
  Eigen::MatrixXd covariance;  ///< over `free`, in natural units
  double chi2 = 0.0;
  int dof = 0;
  int n_iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  double covariance_scale = 1.0;  ///< reduced χ² when it exceeded 1, else 1
  std::vector<double> model_values;
  std::vector<double> residuals;  ///< value − model
  std::string message;

  double reduced_chi2() const { return dof > 0 ? chi2 / dof : 0.0; }
};

/// Minimizes Σ((model − value)/σ)² by damped Gauss–Newton with step halving.
/// Throws NumericalError("degenerate parameter direction: ...") when a free
/// combination is unconstrained, naming that combination. Non-convergence is
/// reported through FitResult::converged.
FitResult fit_hyperfine(const SystemParams& base, const ScanDataset& dataset, const FitParameters& initial,
                        const FitOptions& options = {});

struct BootstrapResult {
  FitParameters mean;
  FitParameters sigmas;
  int n_success = 0;
  int n_requested = 0;
};

/// Residual bootstrap: refits model + resampled normalized residuals · σ.
BootstrapResult bootstrap_fit(const SystemParams& base, const ScanDataset& dataset, const FitResult& fit,
                              int n_resamples, std::uint64_t seed, const FitOptions& options = {});

/// Key-value header followed by a [residuals] CSV table.
void write_fit_report(std::ostream& out, const FitResult& result, const ScanDataset& dataset,
                      const BootstrapResult* bootstrap = nullptr);

/// Residual table alone (CSV with header).
void write_residual_csv(std::ostream& out, const FitResult& result, const ScanDataset& dataset);

}  // namespace nvbeat
