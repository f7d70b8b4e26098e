#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "losg/dynamics.hpp"
#include "losg/los.hpp"
#include "losg/scenario.hpp"

namespace losg {

/// Normalized-time dynamics dx/dτ = F(t, x, u) with Jacobians, as consumed
/// by the discretizer and the dense propagator.
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;

  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;
  /// Control index of the dilation s = dt/dτ, or -1 when τ is physical time.
  virtual int dilation_index() const = 0;
  /// State index of the attitude quaternion, or -1.
  virtual int quaternion_index() const { return -1; }

  /// Evaluates F and, when the pointers are non-null, A = ∂F/∂x, B = ∂F/∂u.
  virtual void evaluate(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                        Eigen::VectorXd* f, Eigen::MatrixXd* A, Eigen::MatrixXd* B) const = 0;

  Eigen::VectorXd derivative(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
};

/// Pointwise path constraints whose clipped squares feed the violation rate ẏ.
struct PathConstraints {
  ViewCone cone;
  std::vector<Keypoint> keypoints;
  StateVector state_min;
  StateVector state_max;
  std::optional<double> min_range;

  PathConstraints();
  static PathConstraints from_scenario(const Scenario& sc);
};

/// ẏ = Σ max{0, g}² over every LoS keypoint, finite state bound and the
/// minimum-range constraint; `gradient` receives ∂ẏ/∂x when non-null.
double violation_rate(double t, const StateVector& x, const PathConstraints& pc,
                      StateVector* gradient = nullptr);

/// F(x̃, ũ) = s [f_6DOF; ẏ] over the 14-state augmented vector.
class AugmentedDynamics final : public DynamicsModel {
 public:
  AugmentedDynamics(VehicleParams params, PathConstraints constraints);
  explicit AugmentedDynamics(const Scenario& sc);

  int state_dim() const override { return layout::kAugStateDim; }
  int control_dim() const override { return layout::kAugControlDim; }
  int dilation_index() const override { return layout::kDilation; }
  int quaternion_index() const override { return layout::kQuaternion; }

  void evaluate(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& u, Eigen::VectorXd* f,
                Eigen::MatrixXd* A, Eigen::MatrixXd* B) const override;

  const PathConstraints& constraints() const { return constraints_; }

 private:
  VehicleParams params_;
  PathConstraints constraints_;
};

/// F(x, ũ) = s f_6DOF over the 13-state vehicle vector (nodal baseline).
class DilatedDynamics final : public DynamicsModel {
 public:
  explicit DilatedDynamics(VehicleParams params) : params_(std::move(params)) {}

  int state_dim() const override { return layout::kStateDim; }
  int control_dim() const override { return layout::kAugControlDim; }
  int dilation_index() const override { return layout::kDilation; }
  int quaternion_index() const override { return layout::kQuaternion; }

  void evaluate(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& u, Eigen::VectorXd* f,
                Eigen::MatrixXd* A, Eigen::MatrixXd* B) const override;

 private:
  VehicleParams params_;
};

/// Convenience wrappers over AugmentedDynamics built from a scenario.
AugmentedState augmented_derivative(double t, const AugmentedState& x,
                                    const AugmentedControl& u, const Scenario& sc);

struct DynamicsJacobians {
  Eigen::Matrix<double, layout::kAugStateDim, layout::kAugStateDim> A;
  Eigen::Matrix<double, layout::kAugStateDim, layout::kAugControlDim> B;
};
DynamicsJacobians dynamics_jacobians(double t, const AugmentedState& x, const AugmentedControl& u,
                                     const Scenario& sc);

}  // namespace losg
