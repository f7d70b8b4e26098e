#include <random>

#include <gtest/gtest.h>

#include "losg/dynamics.hpp"
#include "losg/errors.hpp"

namespace losg {
namespace {

using namespace layout;

VehicleParams quad() { return VehicleParams(1.5, Vec3(0.02, 0.03, 0.04).asDiagonal(), Vec3(0, 0, -9.81)); }

TEST(VehicleState, PackUnpackRoundTrip) {
  VehicleState s;
  s.position = Vec3(1, 2, 3);
  s.velocity = Vec3(-1, 0.5, 0);
  s.attitude = UnitQuaternion::from_axis_angle(Vec3(1, 1, 0), 0.3);
  s.rate = Vec3(0.1, 0.2, 0.3);
  const StateVector x = s.pack();
  EXPECT_EQ(x.segment<3>(kPosition), s.position);
  EXPECT_EQ(x.segment<4>(kQuaternion), s.attitude.coeffs());
  const VehicleState back = VehicleState::unpack(x);
  EXPECT_EQ(back.pack(), x);
  EXPECT_THROW(VehicleState::unpack(Eigen::VectorXd::Zero(5)), InvalidInput);
}

TEST(VehicleParams, RejectsBadMassAndInertia) {
  EXPECT_THROW(VehicleParams(-1.0, Mat3::Identity(), Vec3::Zero()), ValidationError);
  EXPECT_THROW(VehicleParams(1.0, Vec3(1, 0, 1).asDiagonal(), Vec3::Zero()), ValidationError);
  Mat3 asym = Mat3::Identity();
  asym(0, 1) = 0.5;
  EXPECT_THROW(VehicleParams(1.0, asym, Vec3::Zero()), ValidationError);
}

TEST(SixDof, HoverIsStationary) {
  const VehicleParams p = quad();
  StateVector x = VehicleState{}.pack();
  x.segment<3>(kVelocity) = Vec3(0.4, -0.2, 0.1);
  ControlVector u = ControlVector::Zero();
  u.segment<3>(kThrust) = -p.mass() * p.gravity();
  const StateVector f = sixdof_derivative(0.0, x, u, p);
  EXPECT_LT(f.segment<3>(kVelocity).norm(), 1e-14);
  EXPECT_LT(f.segment<3>(kRate).norm(), 1e-14);
  EXPECT_EQ(f.segment<3>(kPosition), x.segment<3>(kVelocity));
}

TEST(SixDof, HoverThrustResolvedInRotatedBody) {
  const VehicleParams p = quad();
  VehicleState s;
  s.attitude = UnitQuaternion::from_axis_angle(Vec3(0.3, -1, 0.2), 0.7);
  ControlVector u = ControlVector::Zero();
  u.segment<3>(kThrust) = quat_to_dcm(s.attitude).transpose() * (-p.mass() * p.gravity());
  EXPECT_LT(sixdof_derivative(0.0, s.pack(), u, p).segment<3>(kVelocity).norm(), 1e-13);
}

TEST(SixDof, FreeFallAcceleratesAtGravity) {
  const VehicleParams p = quad();
  VehicleState s;
  s.attitude = UnitQuaternion::from_axis_angle(Vec3(1, 2, 3), 1.1);
  const StateVector f = sixdof_derivative(0.0, s.pack(), ControlVector::Zero(), p);
  EXPECT_LT((f.segment<3>(kVelocity) - p.gravity()).norm(), 1e-15);
}

TEST(SixDof, EulerEquationTorqueFree) {
  const VehicleParams p(1.0, Vec3(1, 2, 3).asDiagonal(), Vec3::Zero());
  VehicleState s;
  s.rate = Vec3(1, 2, 3);
  const StateVector f = sixdof_derivative(0.0, s.pack(), ControlVector::Zero(), p);
  // Jω = (1, 4, 9); ω × Jω = (2·9 − 3·4, 3·1 − 1·9, 1·4 − 2·1) = (6, −6, 2).
  const Vec3 expected(-6.0 / 1.0, 6.0 / 2.0, -2.0 / 3.0);
  EXPECT_LT((f.segment<3>(kRate) - expected).norm(), 1e-14);
}

TEST(SixDof, QuaternionRateIsHalfOmegaProduct) {
  const VehicleParams p = quad();
  VehicleState s;
  s.attitude = UnitQuaternion::from_axis_angle(Vec3(0, 1, 1), 0.4);
  s.rate = Vec3(0.3, -0.1, 0.8);
  const StateVector f = sixdof_derivative(0.0, s.pack(), ControlVector::Zero(), p);
  const Vec4 expected = 0.5 * omega_matrix(s.rate) * s.attitude.coeffs();
  EXPECT_LT((f.segment<4>(kQuaternion) - expected).norm(), 1e-15);
}

TEST(SixDof, JacobiansMatchCentralDifferences) {
  const VehicleParams p(2.0, (Mat3() << 0.05, 0.001, 0, 0.001, 0.06, 0.002, 0, 0.002, 0.08).finished(),
                        Vec3(0, 0, -9.81));
  std::mt19937 rng(31);
  std::normal_distribution<double> n(0.0, 1.0);
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    StateVector x;
    ControlVector u;
    for (int i = 0; i < kStateDim; ++i) x[i] = n(rng);
    for (int i = 0; i < kControlDim; ++i) u[i] = 5.0 * n(rng);
    x.segment<4>(kQuaternion) *= (0.9 + 0.2 * std::abs(n(rng)) / 3.0) / x.segment<4>(kQuaternion).norm();

    Eigen::Matrix<double, 13, 13> A;
    Eigen::Matrix<double, 13, 6> B;
    sixdof_jacobians(x, u, p, A, B);
    Eigen::Matrix<double, 13, 13> Afd;
    Eigen::Matrix<double, 13, 6> Bfd;
    for (int i = 0; i < kStateDim; ++i) {
      StateVector xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      Afd.col(i) = (sixdof_derivative(0, xp, u, p) - sixdof_derivative(0, xm, u, p)) / (2 * h);
    }
    for (int j = 0; j < kControlDim; ++j) {
      ControlVector up = u, um = u;
      up[j] += h;
      um[j] -= h;
      Bfd.col(j) = (sixdof_derivative(0, x, up, p) - sixdof_derivative(0, x, um, p)) / (2 * h);
    }
    worst = std::max(worst, (A - Afd).cwiseAbs().maxCoeff() / std::max(1.0, Afd.cwiseAbs().maxCoeff()));
    worst = std::max(worst, (B - Bfd).cwiseAbs().maxCoeff() / std::max(1.0, Bfd.cwiseAbs().maxCoeff()));
  }
  EXPECT_LE(worst, 1e-5);
}

}  // namespace
}  // namespace losg
