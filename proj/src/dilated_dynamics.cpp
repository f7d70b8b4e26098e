#include "losg/dilated_dynamics.hpp"

#include <cmath>
#include <limits>

#include "losg/errors.hpp"

namespace losg {

using namespace layout;

Eigen::VectorXd DynamicsModel::derivative(double t, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& u) const {
  Eigen::VectorXd f;
  evaluate(t, x, u, &f, nullptr, nullptr);
  return f;
}

PathConstraints::PathConstraints() {
  state_min.setConstant(-std::numeric_limits<double>::infinity());
  state_max.setConstant(std::numeric_limits<double>::infinity());
}

PathConstraints PathConstraints::from_scenario(const Scenario& sc) {
  PathConstraints pc;
  pc.cone = sc.cone;
  pc.keypoints = sc.keypoints;
  pc.state_min = sc.bounds.state_min;
  pc.state_max = sc.bounds.state_max;
  if (sc.range && sc.range->min > 0.0) pc.min_range = sc.range->min;
  return pc;
}

double violation_rate(double t, const StateVector& x, const PathConstraints& pc,
                      StateVector* gradient) {
  double rate = 0.0;
  if (gradient) gradient->setZero();

  for (const Keypoint& kp : pc.keypoints) {
    const LosEvaluation los = los_residual_full(x, t, kp, pc.cone);
    if (los.value > 0.0) {
      rate += los.value * los.value;
      if (gradient) *gradient += 2.0 * los.value * los.gradient;
    }
  }

  for (int i = 0; i < kStateDim; ++i) {
    const double over = x[i] - pc.state_max[i];
    const double under = pc.state_min[i] - x[i];
    if (over > 0.0) {
      rate += over * over;
      if (gradient) (*gradient)[i] += 2.0 * over;
    } else if (under > 0.0) {
      rate += under * under;
      if (gradient) (*gradient)[i] -= 2.0 * under;
    }
  }

  if (pc.min_range) {
    const Vec3 r = x.segment<3>(kPosition);
    for (const Keypoint& kp : pc.keypoints) {
      const Vec3 d = r - keypoint_position(kp, t);
      const double dist = d.norm();
      const double h = *pc.min_range - dist;
      if (h > 0.0) {
        rate += h * h;
        if (gradient && dist > 0.0) gradient->segment<3>(kPosition) -= 2.0 * h * d / dist;
      }
    }
  }
  return rate;
}

AugmentedDynamics::AugmentedDynamics(VehicleParams params, PathConstraints constraints)
    : params_(std::move(params)), constraints_(std::move(constraints)) {}

AugmentedDynamics::AugmentedDynamics(const Scenario& sc)
    : AugmentedDynamics(sc.vehicle, PathConstraints::from_scenario(sc)) {}

void AugmentedDynamics::evaluate(double t, const Eigen::VectorXd& xv, const Eigen::VectorXd& uv,
                                 Eigen::VectorXd* f, Eigen::MatrixXd* A,
                                 Eigen::MatrixXd* B) const {
  const StateVector x = xv.head<kStateDim>();
  const ControlVector u = uv.head<kControlDim>();
  const double s = uv[kDilation];

  const StateVector f6 = sixdof_derivative(t, x, u, params_);
  StateVector dy;
  const double ydot = violation_rate(t, x, constraints_, A ? &dy : nullptr);

  if (f) {
    f->resize(kAugStateDim);
    f->head<kStateDim>() = s * f6;
    (*f)[kViolation] = s * ydot;
  }
  if (A || B) {
    Eigen::Matrix<double, 13, 13> dfdx;
    Eigen::Matrix<double, 13, 6> dfdu;
    sixdof_jacobians(x, u, params_, dfdx, dfdu);
    if (A) {
      A->setZero(kAugStateDim, kAugStateDim);
      A->topLeftCorner<kStateDim, kStateDim>() = s * dfdx;
      A->block<1, kStateDim>(kViolation, 0) = s * dy.transpose();
    }
    if (B) {
      B->setZero(kAugStateDim, kAugControlDim);
      B->topLeftCorner<kStateDim, kControlDim>() = s * dfdu;
      B->block<kStateDim, 1>(0, kDilation) = f6;
      (*B)(kViolation, kDilation) = ydot;
    }
  }
}

void DilatedDynamics::evaluate(double t, const Eigen::VectorXd& xv, const Eigen::VectorXd& uv,
                               Eigen::VectorXd* f, Eigen::MatrixXd* A, Eigen::MatrixXd* B) const {
  const StateVector x = xv.head<kStateDim>();
  const ControlVector u = uv.head<kControlDim>();
  const double s = uv[kDilation];
  const StateVector f6 = sixdof_derivative(t, x, u, params_);
  if (f) *f = s * f6;
  if (A || B) {
    Eigen::Matrix<double, 13, 13> dfdx;
    Eigen::Matrix<double, 13, 6> dfdu;
    sixdof_jacobians(x, u, params_, dfdx, dfdu);
    if (A) *A = s * dfdx;
    if (B) {
      B->resize(kStateDim, kAugControlDim);
      B->leftCols<kControlDim>() = s * dfdu;
      B->col(kDilation) = f6;
    }
  }
}

AugmentedState augmented_derivative(double t, const AugmentedState& x, const AugmentedControl& u,
                                    const Scenario& sc) {
  if (!(u[kDilation] > 0.0)) throw InvalidInput("augmented_derivative: dilation must be positive");
  const AugmentedDynamics model(sc);
  Eigen::VectorXd f;
  model.evaluate(t, x, u, &f, nullptr, nullptr);
  return f;
}

DynamicsJacobians dynamics_jacobians(double t, const AugmentedState& x, const AugmentedControl& u,
                                     const Scenario& sc) {
  const AugmentedDynamics model(sc);
  Eigen::MatrixXd A, B;
  model.evaluate(t, x, u, nullptr, &A, &B);
  return {A, B};
}

}  // namespace losg
