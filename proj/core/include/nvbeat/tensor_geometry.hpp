#pragma once

// Principal-axis decomposition of the mirror-symmetric hyperfine tensor.

#include <array>

#include <Eigen/Dense>

#include "nvbeat/types.hpp"

namespace nvbeat {

struct PrincipalAxes {
  double in_plane_low = 0.0;   ///< smaller eigenvalue of the xz block, MHz
  double in_plane_high = 0.0;  ///< larger eigenvalue of the xz block, MHz
  double y_value = 0.0;        ///< A_yy; y is a principal axis by symmetry
  double theta_p = 0.0;        ///< degrees, NV z vs the axis of in_plane_high, in [0, 180]
  double theta_p_alt = 0.0;    ///< 180 − theta_p (the z-axis direction is not known)
  /// Columns: axis of in_plane_low, y, axis of in_plane_high. det = +1.
  Eigen::Matrix3d rotation;

  /// (in_plane_low, y_value, in_plane_high).
  std::array<double, 3> values() const;
  /// Same values sorted ascending, for display.
  std::array<double, 3> sorted_values() const;
};

PrincipalAxes principal_axes(const HyperfineTensor& tensor);

struct PrincipalUncertainty {
  double in_plane_low = 0.0;
  double in_plane_high = 0.0;
  double y_value = 0.0;
  double theta_p = 0.0;  ///< degrees
};

/// First-order propagation of independent 1σ errors on (A_xx, A_yy, A_zz, a)
/// through principal_axes, by central differences.
PrincipalUncertainty propagate_principal_uncertainty(const HyperfineTensor& tensor,
                                                     const HyperfineTensor& sigma);

}  // namespace nvbeat
