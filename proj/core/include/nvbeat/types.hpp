#pragma once

// Value types shared by every module. Units at interfaces: MHz, Gauss, µs,
// degrees. Radians appear only inside implementations.

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace nvbeat {

using cd = std::complex<double>;
using Matrix6cd = Eigen::Matrix<cd, 6, 6>;
using Vector6cd = Eigen::Matrix<cd, 6, 1>;

inline constexpr double kDegree = std::numbers::pi / 180.0;

constexpr double deg_to_rad(double deg) { return deg * kDegree; }
constexpr double rad_to_deg(double rad) { return rad / kDegree; }

/// Wraps an angle in degrees into [0, 360).
double wrap_degrees(double deg);

/// Wraps an angle in degrees into (-180, 180].
double wrap_signed_degrees(double deg);

/// NV-frame hyperfine tensor restricted by the mirror plane: A_xx, A_yy,
/// A_zz and the shared off-diagonal A_zx = A_xz (`a`). All in MHz.
struct HyperfineTensor {
  double a_xx = 0.0;
  double a_yy = 0.0;
  double a_zz = 0.0;
  double a = 0.0;

  /// The symmetric 3x3 matrix [[a_xx,0,a],[0,a_yy,0],[a,0,a_zz]].
  Eigen::Matrix3d matrix() const;

  /// Throws InvalidInput if any component is not finite.
  void validate() const;

  friend bool operator==(const HyperfineTensor&, const HyperfineTensor&) = default;
};

/// Static Hamiltonian parameters. Defaults are the usual NV / 13C values;
/// nothing downstream hard-codes them.
struct SystemParams {
  double d = 2870.0;          ///< zero-field splitting, MHz
  double gamma_e = 2.8025;    ///< electron gyromagnetic ratio, MHz/G
  double gamma_n = 1.0705e-3; ///< 13C gyromagnetic ratio, MHz/G
  HyperfineTensor tensor{};
  /// Flips the sign of the nuclear Zeeman term (sensitivity studies only).
  bool flip_nuclear_zeeman = false;

  /// d > 0, gamma_e > 0, |gamma_n| < gamma_e / 100, finite tensor.
  void validate() const;

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

enum class Frame { nv, lab };

/// Magnetic field magnitude and direction. Construct through the factories so
/// the invariants (b >= 0, theta in [0, 180], phi wrapped into [0, 360)) hold.
class FieldOrientation {
 public:
  FieldOrientation() = default;

  static FieldOrientation nv(double b_gauss, double theta_deg, double phi_deg);
  static FieldOrientation lab(double b_gauss, double theta_deg, double phi_deg);
  static FieldOrientation make(double b_gauss, double theta_deg, double phi_deg,
                               Frame frame);

  double b() const { return b_; }
  double theta() const { return theta_; }
  double phi() const { return phi_; }
  Frame frame() const { return frame_; }

  /// Unit vector (sinθ cosφ, sinθ sinφ, cosθ) in the declared frame.
  Eigen::Vector3d direction() const;

  /// Same orientation with a different magnitude.
  FieldOrientation with_b(double b_gauss) const;

  friend bool operator==(const FieldOrientation&, const FieldOrientation&) = default;

 private:
  double b_ = 0.0;
  double theta_ = 0.0;
  double phi_ = 0.0;
  Frame frame_ = Frame::nv;
};

/// Orientation of the NV symmetry axis in the laboratory frame.
struct NvAxis {
  double theta_deg = 0.0;
  double phi_deg = 0.0;
};

/// Re-expresses a LAB-frame field in the NV frame. The NV z axis is `axis`;
/// the NV x axis is taken along the lab polar unit vector e_θ at the axis
/// (so lab θ sweeps through the axis stay in the NV φ = 0 / 180 plane).
FieldOrientation lab_to_nv(const FieldOrientation& lab_field, const NvAxis& axis);

}  // namespace nvbeat
