#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "losg/attitude.hpp"
#include "losg/errors.hpp"

namespace losg {
namespace {

Vec4 random_unit_quaternion(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec4 q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized();
}

// Rodrigues: R = I + sinθ K + (1 − cosθ) K², K the cross matrix of the unit axis.
Mat3 rodrigues(const Vec3& axis, double angle) {
  const Vec3 k = axis.normalized();
  Mat3 K;
  K << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  return Mat3::Identity() + std::sin(angle) * K + (1.0 - std::cos(angle)) * K * K;
}

// Hamilton product written out component by component.
Vec4 hamilton(const Vec4& a, const Vec4& b) {
  return Vec4(a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
              a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
              a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
              a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]);
}

template <typename F>
Eigen::Matrix<double, 3, 4> central_difference(F f, const Vec4& q, double h = 1e-6) {
  Eigen::Matrix<double, 3, 4> J;
  for (int i = 0; i < 4; ++i) {
    Vec4 qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    J.col(i) = (f(qp) - f(qm)) / (2.0 * h);
  }
  return J;
}

double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

TEST(QuatToDcm, IdentityQuaternionGivesIdentity) {
  EXPECT_TRUE(quat_to_dcm(UnitQuaternion()).isApprox(Mat3::Identity(), 0.0));
}

TEST(QuatToDcm, HalfTurnAboutX) {
  const Mat3 expected = rodrigues(Vec3::UnitX(), M_PI);
  const Mat3 C = quat_to_dcm(UnitQuaternion(0, 1, 0, 0));
  EXPECT_LT((C - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((C - Eigen::Vector3d(1, -1, -1).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff(),
            1e-15);
}

TEST(QuatToDcm, MatchesRodriguesForAxisAngle) {
  std::mt19937 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  for (int i = 0; i < 50; ++i) {
    const Vec3 axis(n(rng), n(rng), n(rng));
    const double a = ang(rng);
    const Mat3 C = quat_to_dcm(UnitQuaternion::from_axis_angle(axis, a));
    EXPECT_LT((C - rodrigues(axis, a)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(QuatToDcm, RandomQuaternionsAreOrthonormal) {
  std::mt19937 rng(11);
  for (int i = 0; i < 100; ++i) {
    const Mat3 C = quat_to_dcm(UnitQuaternion(random_unit_quaternion(rng)));
    EXPECT_LT((C.transpose() * C - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(C.determinant(), 1.0, 1e-12);
  }
}

TEST(QuatToDcm, ProductComposes) {
  std::mt19937 rng(13);
  for (int i = 0; i < 20; ++i) {
    const UnitQuaternion a(random_unit_quaternion(rng));
    const UnitQuaternion b(random_unit_quaternion(rng));
    EXPECT_LT((quat_to_dcm(a * b) - quat_to_dcm(a) * quat_to_dcm(b)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(((a * b).coeffs() - hamilton(a.coeffs(), b.coeffs())).norm(), 1e-15);
  }
}

TEST(QuatToDcm, RejectsNonUnitQuaternion) {
  EXPECT_THROW(quat_to_dcm(UnitQuaternion(1.01, 0, 0, 0)), InvalidInput);
  EXPECT_NO_THROW(quat_to_dcm(UnitQuaternion(1.0 + 1e-8, 0, 0, 0)));
}

TEST(Skew, MatchesCrossProduct) {
  const Vec3 a(1.5, -2.0, 0.25), b(-0.5, 3.0, 4.0);
  EXPECT_LT((skew(a) * b - a.cross(b)).norm(), 1e-15);
}

TEST(OmegaMatrix, ZeroRateIsZero) {
  EXPECT_TRUE(omega_matrix(Vec3::Zero()).isZero(0.0));
}

TEST(OmegaMatrix, MatchesRightMultiplicationByPureQuaternion) {
  std::mt19937 rng(17);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Vec4 q = random_unit_quaternion(rng);
    const Vec3 w(n(rng), n(rng), n(rng));
    const Vec4 expected = hamilton(q, Vec4(0.0, w.x(), w.y(), w.z()));
    EXPECT_LT((omega_matrix(w) * q - expected).norm(), 1e-14);
    EXPECT_LT((omega_rate_matrix(q) * w - expected).norm(), 1e-14);
  }
}

TEST(OmegaMatrix, SingleAxisIntegrationMatchesClosedForm) {
  const Vec3 w(0.0, 0.0, 1.3);
  const double T = 2.0;
  const int steps = 2000;
  const double h = T / steps;
  Vec4 q(1.0, 0.0, 0.0, 0.0);
  auto f = [&](const Vec4& x) -> Vec4 { return 0.5 * omega_matrix(w) * x; };
  for (int i = 0; i < steps; ++i) {
    const Vec4 k1 = f(q), k2 = f(q + 0.5 * h * k1), k3 = f(q + 0.5 * h * k2), k4 = f(q + h * k3);
    q += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const double theta = w.norm() * T;
  const Vec4 expected(std::cos(theta / 2), 0.0, 0.0, std::sin(theta / 2));
  EXPECT_LT((q - expected).norm(), 1e-8);
}

TEST(RotateJacobian, MatchesCentralDifferencesOffTheSphere) {
  std::mt19937 rng(19);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Vec4 q(n(rng), n(rng), n(rng), n(rng));
    const Vec3 v(n(rng), n(rng), n(rng));
    const auto fd = central_difference([&](const Vec4& x) -> Vec3 { return dcm_of(x) * v; }, q);
    const auto fdt =
        central_difference([&](const Vec4& x) -> Vec3 { return dcm_of(x).transpose() * v; }, q);
    EXPECT_LT(relative_error(rotate_jacobian(q, v), fd), 1e-5);
    EXPECT_LT(relative_error(rotate_transpose_jacobian(q, v), fdt), 1e-5);
  }
}

TEST(RotationOf, InvariantToQuaternionNorm) {
  std::mt19937 rng(23);
  for (int i = 0; i < 20; ++i) {
    const Vec4 q = random_unit_quaternion(rng);
    EXPECT_LT((rotation_of(2.5 * q) - quat_to_dcm(UnitQuaternion(q))).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(RotationJacobian, MatchesCentralDifferences) {
  std::mt19937 rng(29);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Vec4 q = random_unit_quaternion(rng) * (0.8 + 0.4 * std::abs(n(rng)) / 3.0);
    const Vec3 v(n(rng), n(rng), n(rng));
    const auto fd =
        central_difference([&](const Vec4& x) -> Vec3 { return rotation_of(x) * v; }, q);
    const auto fdt = central_difference(
        [&](const Vec4& x) -> Vec3 { return rotation_of(x).transpose() * v; }, q);
    EXPECT_LT(relative_error(rotation_jacobian(q, v), fd), 1e-5);
    EXPECT_LT(relative_error(rotation_transpose_jacobian(q, v), fdt), 1e-5);
    // Radial direction leaves the rotation unchanged.
    EXPECT_LT((rotation_jacobian(q, v) * q).norm(), 1e-12);
  }
}

}  // namespace
}  // namespace losg
