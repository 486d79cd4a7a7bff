#include "nvbeat/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nvbeat/errors.hpp"

namespace nvbeat {

double wrap_degrees(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  if (w >= 360.0) w -= 360.0;
  return w;
}

double wrap_signed_degrees(double deg) {
  double w = wrap_degrees(deg);
  return w > 180.0 ? w - 360.0 : w;
}

Eigen::Matrix3d HyperfineTensor::matrix() const {
  Eigen::Matrix3d m;
  m << a_xx, 0.0, a,
       0.0, a_yy, 0.0,
       a, 0.0, a_zz;
  return m;
}

void HyperfineTensor::validate() const {
  if (!std::isfinite(a_xx) || !std::isfinite(a_yy) || !std::isfinite(a_zz) ||
      !std::isfinite(a)) {
    throw InvalidInput("hyperfine tensor components must be finite");
  }
}

void SystemParams::validate() const {
  if (!(d > 0.0) || !std::isfinite(d)) throw InvalidInput("zero-field splitting d must be > 0");
  if (!(gamma_e > 0.0) || !std::isfinite(gamma_e)) throw InvalidInput("gamma_e must be > 0");
  if (!std::isfinite(gamma_n) || std::abs(gamma_n) >= gamma_e / 100.0) {
    throw InvalidInput("|gamma_n| must be below gamma_e / 100");
  }
  tensor.validate();
}

FieldOrientation FieldOrientation::make(double b_gauss, double theta_deg, double phi_deg,
                                        Frame frame) {
  if (!std::isfinite(b_gauss) || b_gauss < 0.0) {
    throw InvalidInput("field magnitude must be finite and >= 0, got " + std::to_string(b_gauss));
  }
  if (!std::isfinite(theta_deg) || theta_deg < 0.0 || theta_deg > 180.0) {
    throw InvalidInput("polar angle must lie in [0, 180] degrees, got " + std::to_string(theta_deg));
  }
  if (!std::isfinite(phi_deg)) throw InvalidInput("azimuthal angle must be finite");
  FieldOrientation f;
  f.b_ = b_gauss;
  f.theta_ = theta_deg;
  f.phi_ = wrap_degrees(phi_deg);
  f.frame_ = frame;
  return f;
}

FieldOrientation FieldOrientation::nv(double b_gauss, double theta_deg, double phi_deg) {
  return make(b_gauss, theta_deg, phi_deg, Frame::nv);
}

FieldOrientation FieldOrientation::lab(double b_gauss, double theta_deg, double phi_deg) {
  return make(b_gauss, theta_deg, phi_deg, Frame::lab);
}

Eigen::Vector3d FieldOrientation::direction() const {
  const double th = deg_to_rad(theta_);
  const double ph = deg_to_rad(phi_);
  return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
}

FieldOrientation FieldOrientation::with_b(double b_gauss) const {
  return make(b_gauss, theta_, phi_, frame_);
}

FieldOrientation lab_to_nv(const FieldOrientation& lab_field, const NvAxis& axis) {
  if (lab_field.frame() != Frame::lab) throw InvalidInput("lab_to_nv expects a LAB-frame field");
  const double th = deg_to_rad(axis.theta_deg);
  const double ph = deg_to_rad(axis.phi_deg);
  const Eigen::Vector3d ez(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
  Eigen::Vector3d ex(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th));
  const Eigen::Vector3d ey = ez.cross(ex);

  const Eigen::Vector3d n = lab_field.direction();
  const double x = n.dot(ex);
  const double y = n.dot(ey);
  const double z = std::clamp(n.dot(ez), -1.0, 1.0);
  const double theta = rad_to_deg(std::acos(z));
  const double phi = (std::abs(x) < 1e-15 && std::abs(y) < 1e-15) ? 0.0 : rad_to_deg(std::atan2(y, x));
  return FieldOrientation::nv(lab_field.b(), theta, phi);
}

}  // namespace nvbeat
