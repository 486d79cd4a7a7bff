#pragma once

// Locating extrema of angle scans and the single-transition axis.

#include <vector>

#include "nvbeat/estimation/scan_dataset.hpp"
#include "nvbeat/types.hpp"

namespace nvbeat {

enum class AxisModel { quadratic, quartic };
enum class SweepAxis { theta, phi };

struct AxisMinimum {
  double angle = 0.0;        ///< vertex x0, degrees
  double uncertainty = 0.0;  ///< 1σ of x0, degrees
  double v0 = 0.0;           ///< value at the vertex
  double curvature = 0.0;    ///< k in v0 + k (x − x0)²
  double quartic = 0.0;      ///< q in + q (x − x0)⁴ (quartic model only)
  double chi2 = 0.0;
};

/// Weighted fit of v0 + k (x − x0)² (+ q (x − x0)⁴) to samples (x, y, σ).
/// Needs >= 5 points with the smallest sample strictly inside the range and
/// a fitted vertex inside it; otherwise throws NumericalError("extremum not
/// bracketed"). The 1σ of x0 comes from the linearized covariance, scaled by
/// the reduced χ² when it exceeds 1.
AxisMinimum find_axis_minimum(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& sigma, AxisModel model = AxisModel::quadratic);

/// Same, on a dataset whose points differ only in the swept angle.
AxisMinimum find_axis_minimum(const ScanDataset& scan, SweepAxis axis, AxisModel model = AxisModel::quadratic);

/// Angle where the finite-difference derivative of y(x) crosses zero from
/// negative to positive, by linear interpolation between the midpoints.
/// Throws NumericalError("extremum not bracketed") if there is none.
double derivative_zero_crossing(const std::vector<double>& x, const std::vector<double>& y);

struct SingleTransitionAxis {
  double theta = 0.0;            ///< degrees, NV frame
  double phi = 0.0;              ///< degrees in (−180, 180]
  double amplitude_ratio = 0.0;  ///< min(Ω+, Ω−) / max(Ω+, Ω−)
};

struct AxisSearchOptions {
  double grid_step = 2.0;      ///< degrees
  double tolerance = 0.01;     ///< degrees
  double theta_max = 90.0;
  double phi_min = -90.0;
  double phi_max = 90.0;
  double accept_ratio = 0.05;  ///< no axis if the best ratio stays above this
  int threads = 1;
};

/// Minimizes the Λ amplitude ratio over (θ, φ): coarse grid, then alternating
/// golden-section refinement. Throws NumericalError("no single-transition axis
/// in range") if the ratio never drops below accept_ratio.
SingleTransitionAxis find_single_transition_axis(const SystemParams& params, double b_gauss,
                                                 const AxisSearchOptions& options = {});

/// Minimum m_S weight of the three Λ states for the Λ picture to apply.
inline constexpr double kLambdaPurity = 0.9;

/// min/max Λ amplitude ratio at one orientation, or 1 where the Λ system
/// cannot be identified or its states carry less than kLambdaPurity of their
/// nominal m_S character.
double lambda_ratio_at(const SystemParams& params, const FieldOrientation& field);

}  // namespace nvbeat
