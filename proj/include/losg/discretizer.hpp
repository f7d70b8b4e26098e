#pragma once

#include <vector>

#include <Eigen/Dense>

#include "losg/dilated_dynamics.hpp"

namespace losg {

/// Uniform normalized grid τ_k = k / (N − 1), k = 0 … N − 1.
class TimeGrid {
 public:
  explicit TimeGrid(int nodes);

  int nodes() const { return nodes_; }
  int intervals() const { return nodes_ - 1; }
  double step() const { return 1.0 / static_cast<double>(nodes_ - 1); }
  double tau(int k) const;

  /// Interval index containing τ (the last interval owns τ = 1).
  int interval_of(double tau) const;

 private:
  int nodes_;
};

/// Node values of a trajectory. States are 13- or 14-dimensional, controls 7.
struct Trajectory {
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> controls;

  int nodes() const { return static_cast<int>(states.size()); }
  TimeGrid grid() const { return TimeGrid(nodes()); }
};

/// Physical time at each node, t_k = t0 + Σ (s_j + s_{j+1})/2 Δτ. With no
/// dilation channel (dilation_index < 0) the result is t0 + τ_k.
std::vector<double> node_times(const std::vector<Eigen::VectorXd>& controls, int dilation_index,
                               double t0 = 0.0);

/// First-order hold σ⁻ u_k + σ⁺ u_{k+1} for τ ∈ [τ_k, τ_{k+1}]. The closed
/// right end is accepted so the hold is continuous; anything outside the
/// interval (beyond 1e-12) raises InvalidInput.
Eigen::VectorXd foh_interp(const Eigen::VectorXd& u_k, const Eigen::VectorXd& u_k1, double tau,
                           double tau_k, double tau_k1);

/// Exact discretization of one interval about a reference segment.
struct IntervalDiscretization {
  Eigen::MatrixXd A;        // Φ(τ_{k+1}, τ_k)
  Eigen::MatrixXd B_minus;  // ∫ Φ(τ_{k+1}, ξ) B(ξ) σ⁻(ξ) dξ
  Eigen::MatrixXd B_plus;   // ∫ Φ(τ_{k+1}, ξ) B(ξ) σ⁺(ξ) dξ
  Eigen::VectorXd propagated;  // nonlinear x(τ_{k+1}) started from the reference node
  Eigen::VectorXd defect;      // propagated − reference x_{k+1}
};

struct Discretization {
  std::vector<IntervalDiscretization> intervals;

  /// max_k ‖defect_k‖∞
  double max_defect() const;
};

/// Integrates the nonlinear dynamics, the STM and both input convolution
/// integrals jointly with classical RK4. The convolutions are accumulated as
/// forward ODEs Ṗ± = A P± + B σ±, so no matrix is ever inverted.
IntervalDiscretization discretize_interval(const DynamicsModel& model, const Eigen::VectorXd& x_k,
                                           const Eigen::VectorXd& x_next_ref,
                                           const Eigen::VectorXd& u_k,
                                           const Eigen::VectorXd& u_k1, double tau_k,
                                           double tau_k1, double t_k, int substeps,
                                           int index = 0);

/// Discretizes every interval of `ref`; intervals are independent.
Discretization discretize(const DynamicsModel& model, const Trajectory& ref, int substeps,
                          double t0 = 0.0);

struct DenseTrajectory {
  std::vector<double> tau;
  std::vector<double> time;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> controls;

  int size() const { return static_cast<int>(tau.size()); }
};

/// Single-shooting propagation from x0 under the FOH control profile,
/// emitting `samples` points uniformly spaced in τ ∈ [0, 1]. The attitude
/// quaternion (if any) is renormalized after every step.
DenseTrajectory propagate_nonlinear(const DynamicsModel& model, const Eigen::VectorXd& x0,
                                    const std::vector<Eigen::VectorXd>& controls, int samples,
                                    double t0 = 0.0);

/// Per-interval propagation from each node of `traj`; returns the defects
/// x_nl(τ_{k+1}) − x_{k+1}.
std::vector<Eigen::VectorXd> interval_defects(const DynamicsModel& model, const Trajectory& traj,
                                              int substeps, double t0 = 0.0);

}  // namespace losg
