#include "nvbeat/tensor_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace nvbeat {

std::array<double, 3> PrincipalAxes::values() const { return {in_plane_low, y_value, in_plane_high}; }

std::array<double, 3> PrincipalAxes::sorted_values() const {
  auto v = values();
  std::sort(v.begin(), v.end());
  return v;
}

PrincipalAxes principal_axes(const HyperfineTensor& tensor) {
  tensor.validate();
  const double mean = 0.5 * (tensor.a_xx + tensor.a_zz);
  const double half_diff = 0.5 * (tensor.a_xx - tensor.a_zz);
  const double radius = std::hypot(half_diff, tensor.a);

  PrincipalAxes out;
  out.in_plane_low = mean - radius;
  out.in_plane_high = mean + radius;
  out.y_value = tensor.a_yy;

  // Axis of the larger in-plane eigenvalue, at angle alpha from x in the xz plane.
  double hx = 0.0, hz = 1.0;
  if (radius > 0.0) {
    const double alpha = 0.5 * std::atan2(tensor.a, half_diff);
    hx = std::cos(alpha);
    hz = std::sin(alpha);
    if (hz < 0.0 || (hz == 0.0 && hx < 0.0)) {
      hx = -hx;
      hz = -hz;
    }
  }
  out.theta_p = rad_to_deg(std::acos(std::clamp(hz, -1.0, 1.0)));
  out.theta_p_alt = 180.0 - out.theta_p;

  // (low, y, high) is right-handed when low = y × high = (hz, 0, −hx).
  out.rotation << hz, 0.0, hx,
                  0.0, 1.0, 0.0,
                  -hx, 0.0, hz;
  return out;
}

PrincipalUncertainty propagate_principal_uncertainty(const HyperfineTensor& tensor,
                                                     const HyperfineTensor& sigma) {
  const std::array<double, 4> base{tensor.a_xx, tensor.a_yy, tensor.a_zz, tensor.a};
  const std::array<double, 4> sig{sigma.a_xx, sigma.a_yy, sigma.a_zz, sigma.a};
  auto make = [](const std::array<double, 4>& v) { return HyperfineTensor{v[0], v[1], v[2], v[3]}; };

  std::array<double, 4> var{};  // low, high, y, theta
  for (std::size_t i = 0; i < 4; ++i) {
    if (sig[i] == 0.0) continue;
    const double h = std::max(1e-6, 1e-4 * std::abs(sig[i]));
    auto up = base, dn = base;
    up[i] += h;
    dn[i] -= h;
    const PrincipalAxes pu = principal_axes(make(up));
    const PrincipalAxes pd = principal_axes(make(dn));
    const std::array<double, 4> d{(pu.in_plane_low - pd.in_plane_low) / (2 * h),
                                  (pu.in_plane_high - pd.in_plane_high) / (2 * h),
                                  (pu.y_value - pd.y_value) / (2 * h),
                                  (pu.theta_p - pd.theta_p) / (2 * h)};
    for (std::size_t k = 0; k < 4; ++k) var[k] += d[k] * d[k] * sig[i] * sig[i];
  }
  return {std::sqrt(var[0]), std::sqrt(var[1]), std::sqrt(var[2]), std::sqrt(var[3])};
}

}  // namespace nvbeat
