#include <gtest/gtest.h>

#include <random>

#include "frozen_values.hpp"
#include "oracle.hpp"
#include "nvbeat/tensor_geometry.hpp"

using namespace nvbeat;

TEST(PrincipalAxes, Reference) {
  const auto pa = principal_axes({166.9, 122.9, 90.0, -90.3});
  EXPECT_NEAR(pa.in_plane_low, frozen::kPrincipalLow, 1e-3);
  EXPECT_NEAR(pa.in_plane_high, frozen::kPrincipalHigh, 1e-3);
  EXPECT_NEAR(pa.in_plane_low, 30.3, 0.1);
  EXPECT_NEAR(pa.in_plane_high, 226.6, 0.1);
  EXPECT_DOUBLE_EQ(pa.y_value, 122.9);
  EXPECT_NEAR(pa.theta_p, 56.5, 0.1);
  EXPECT_NEAR(pa.theta_p_alt, 123.5, 0.1);
  // Not uniaxial: the two transverse principal values differ by > 90 MHz.
  EXPECT_GT(std::abs(pa.y_value - pa.in_plane_low), 90.0);
  const auto sorted = pa.sorted_values();
  EXPECT_TRUE(std::is_sorted(sorted.begin(), sorted.end()));
}

TEST(PrincipalAxes, AlreadyDiagonal) {
  const auto pa = principal_axes({200, 120, 130, 0});
  EXPECT_DOUBLE_EQ(pa.in_plane_low, 130);
  EXPECT_DOUBLE_EQ(pa.in_plane_high, 200);
  EXPECT_NEAR(pa.theta_p, 90.0, 1e-12);
  const auto pb = principal_axes({100, 120, 130, 0});
  EXPECT_NEAR(pb.theta_p, 0.0, 1e-12);
}

TEST(PrincipalAxes, PureOffDiagonal) {
  const auto pa = principal_axes({0, 7, 0, 1});
  EXPECT_NEAR(pa.in_plane_low, -1.0, 1e-12);
  EXPECT_NEAR(pa.in_plane_high, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(pa.y_value, 7.0);
  EXPECT_NEAR(std::min(pa.theta_p, pa.theta_p_alt), 45.0, 1e-9);
}

TEST(PrincipalAxes, InvariantsOverRandomTensors) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-300.0, 300.0);
  for (int k = 0; k < 500; ++k) {
    const HyperfineTensor t{u(rng), u(rng), u(rng), u(rng)};
    const auto pa = principal_axes(t);
    const auto v = pa.values();
    const Eigen::Matrix3d a = t.matrix();
    const Eigen::Matrix3d d = pa.rotation.transpose() * a * pa.rotation;
    EXPECT_LT((d - Eigen::Matrix3d(d.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(v[0] + v[1] + v[2], t.a_xx + t.a_yy + t.a_zz, 1e-10);
    EXPECT_NEAR(pa.in_plane_low * pa.in_plane_high, t.a_xx * t.a_zz - t.a * t.a, 1e-9 * std::max(1.0, a.squaredNorm()));
    const Eigen::Matrix3d rebuilt = pa.rotation * Eigen::Vector3d(v[0], v[1], v[2]).asDiagonal() * pa.rotation.transpose();
    EXPECT_LT((rebuilt - a).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(pa.rotation.determinant(), 1.0, 1e-12);
    EXPECT_EQ(pa.y_value, t.a_yy);
    EXPECT_GE(pa.theta_p, 0.0);
    EXPECT_LE(pa.theta_p, 180.0);
    EXPECT_NEAR(pa.theta_p + pa.theta_p_alt, 180.0, 1e-12);
    const auto ev = oracle::tensor_eigenvalues(t.a_xx, t.a_yy, t.a_zz, t.a);
    const auto sorted = pa.sorted_values();
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(sorted[i], ev[i], 1e-9);
  }
}

TEST(PrincipalUncertainty, Reference) {
  const auto u = propagate_principal_uncertainty({166.9, 122.9, 90.0, -90.3}, {0.2, 0.2, 0.5, 0.3});
  EXPECT_NEAR(u.y_value, 0.2, 1e-8);
  EXPECT_GT(u.in_plane_low, 0.0);
  EXPECT_LT(u.in_plane_low, 1.0);
  EXPECT_GT(u.in_plane_high, 0.0);
  EXPECT_LT(u.in_plane_high, 1.0);
  EXPECT_GT(u.theta_p, 0.0);
  EXPECT_LT(u.theta_p, 1.0);
}
