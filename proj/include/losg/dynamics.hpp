#pragma once

#include <Eigen/Dense>

#include "losg/attitude.hpp"

namespace losg {

/// Component layout shared by every state/control vector in the library.
namespace layout {
inline constexpr int kPosition = 0;
inline constexpr int kVelocity = 3;
inline constexpr int kQuaternion = 6;
inline constexpr int kRate = 10;
inline constexpr int kViolation = 13;  // y, augmented state only
inline constexpr int kStateDim = 13;
inline constexpr int kAugStateDim = 14;

inline constexpr int kThrust = 0;
inline constexpr int kMoment = 3;
inline constexpr int kDilation = 6;  // s, augmented control only
inline constexpr int kControlDim = 6;
inline constexpr int kAugControlDim = 7;
}  // namespace layout

using StateVector = Eigen::Matrix<double, layout::kStateDim, 1>;
using ControlVector = Eigen::Matrix<double, layout::kControlDim, 1>;
using AugmentedState = Eigen::Matrix<double, layout::kAugStateDim, 1>;
using AugmentedControl = Eigen::Matrix<double, layout::kAugControlDim, 1>;

/// Rigid-body state x = [r_I v_I q_B→I ω_B].
struct VehicleState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  UnitQuaternion attitude;
  Vec3 rate = Vec3::Zero();

  StateVector pack() const;
  static VehicleState unpack(const Eigen::Ref<const Eigen::VectorXd>& x);
};

/// Body-frame thrust and moment.
struct ControlInput {
  Vec3 thrust = Vec3::Zero();
  Vec3 moment = Vec3::Zero();

  ControlVector pack() const;
};

/// Mass properties and gravity. The constructor rejects non-positive mass
/// and inertia tensors that are not symmetric positive definite.
class VehicleParams {
 public:
  VehicleParams();
  VehicleParams(double mass, const Mat3& inertia, const Vec3& gravity);

  double mass() const { return mass_; }
  const Mat3& inertia() const { return inertia_; }
  const Mat3& inertia_inverse() const { return inertia_inv_; }
  const Vec3& gravity() const { return gravity_; }

 private:
  double mass_;
  Mat3 inertia_;
  Mat3 inertia_inv_;
  Vec3 gravity_;
};

/// f_6DOF(t, x, u). The time argument is unused by the rigid-body model but
/// kept so every dynamics function shares one signature.
StateVector sixdof_derivative(double t, const StateVector& x, const ControlVector& u,
                              const VehicleParams& p);

/// ∂f_6DOF/∂x and ∂f_6DOF/∂u, with the quaternion treated as four free reals.
void sixdof_jacobians(const StateVector& x, const ControlVector& u, const VehicleParams& p,
                      Eigen::Matrix<double, 13, 13>& dfdx, Eigen::Matrix<double, 13, 6>& dfdu);

}  // namespace losg
