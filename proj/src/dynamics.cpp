#include "losg/dynamics.hpp"

#include <cmath>

#include "losg/errors.hpp"

namespace losg {

using namespace layout;

StateVector VehicleState::pack() const {
  StateVector x;
  x.segment<3>(kPosition) = position;
  x.segment<3>(kVelocity) = velocity;
  x.segment<4>(kQuaternion) = attitude.coeffs();
  x.segment<3>(kRate) = rate;
  return x;
}

VehicleState VehicleState::unpack(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() < kStateDim) throw InvalidInput("VehicleState::unpack: vector too short");
  VehicleState s;
  s.position = x.segment<3>(kPosition);
  s.velocity = x.segment<3>(kVelocity);
  s.attitude = UnitQuaternion(Vec4(x.segment<4>(kQuaternion)));
  s.rate = x.segment<3>(kRate);
  return s;
}

ControlVector ControlInput::pack() const {
  ControlVector u;
  u << thrust, moment;
  return u;
}

VehicleParams::VehicleParams()
    : VehicleParams(1.0, Vec3(0.03, 0.03, 0.06).asDiagonal(), Vec3(0.0, 0.0, -9.81)) {}

VehicleParams::VehicleParams(double mass, const Mat3& inertia, const Vec3& gravity)
    : mass_(mass), inertia_(inertia), gravity_(gravity) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw ValidationError("vehicle.mass", "mass must be positive");
  }
  if (!inertia.allFinite() || (inertia - inertia.transpose()).cwiseAbs().maxCoeff() >
                                  1e-12 * (1.0 + inertia.cwiseAbs().maxCoeff())) {
    throw ValidationError("vehicle.inertia", "inertia tensor must be symmetric");
  }
  Eigen::LLT<Mat3> llt(inertia);
  if (llt.info() != Eigen::Success) {
    throw ValidationError("vehicle.inertia", "inertia tensor must be positive definite");
  }
  if (!gravity.allFinite()) throw ValidationError("vehicle.gravity", "must be finite");
  inertia_inv_ = llt.solve(Mat3::Identity());
}

StateVector sixdof_derivative(double /*t*/, const StateVector& x, const ControlVector& u,
                              const VehicleParams& p) {
  const Vec4 q = x.segment<4>(kQuaternion);
  const Vec3 w = x.segment<3>(kRate);
  const Vec3 f = u.segment<3>(kThrust);
  const Vec3 m = u.segment<3>(kMoment);

  StateVector dx;
  dx.segment<3>(kPosition) = x.segment<3>(kVelocity);
  dx.segment<3>(kVelocity) = rotation_of(q) * f / p.mass() + p.gravity();
  dx.segment<4>(kQuaternion) = 0.5 * omega_matrix(w) * q;
  dx.segment<3>(kRate) = p.inertia_inverse() * (m - w.cross(p.inertia() * w));
  return dx;
}

void sixdof_jacobians(const StateVector& x, const ControlVector& u, const VehicleParams& p,
                      Eigen::Matrix<double, 13, 13>& dfdx, Eigen::Matrix<double, 13, 6>& dfdu) {
  const Vec4 q = x.segment<4>(kQuaternion);
  const Vec3 w = x.segment<3>(kRate);
  const Vec3 f = u.segment<3>(kThrust);
  const Mat3& J = p.inertia();
  const Mat3& Jinv = p.inertia_inverse();

  dfdx.setZero();
  dfdu.setZero();
  dfdx.block<3, 3>(kPosition, kVelocity).setIdentity();
  dfdx.block<3, 4>(kVelocity, kQuaternion) = rotation_jacobian(q, f) / p.mass();
  dfdx.block<4, 4>(kQuaternion, kQuaternion) = 0.5 * omega_matrix(w);
  dfdx.block<4, 3>(kQuaternion, kRate) = 0.5 * omega_rate_matrix(q);
  // d(ω × Jω)/dω = [ω×]J − [Jω×]
  dfdx.block<3, 3>(kRate, kRate) = -Jinv * (skew(w) * J - skew(J * w));

  dfdu.block<3, 3>(kVelocity, kThrust) = rotation_of(q) / p.mass();
  dfdu.block<3, 3>(kRate, kMoment) = Jinv;
}

}  // namespace losg
