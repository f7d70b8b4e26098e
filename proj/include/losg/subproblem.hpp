#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "losg/conic.hpp"
#include "losg/discretizer.hpp"
#include "losg/scenario.hpp"

namespace losg {

/// CT: augmented-state formulation; DT: nodal-constraint baseline.
enum class Method { kCt, kDt };

const char* to_string(Method m);
std::optional<Method> parse_method(const std::string& s);

/// Component-wise ξ̂ = (ξ − offset) / scale. Finite [min, max] maps onto
/// [−1, 1]; unbounded components keep the identity; min = max freezes the
/// component at that value (scale 1).
class ScalingMap {
 public:
  ScalingMap() = default;
  ScalingMap(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);
  static ScalingMap identity(int n);

  int size() const { return static_cast<int>(scale_.size()); }
  double scale(int i) const { return scale_[i]; }
  double offset(int i) const { return offset_[i]; }
  bool frozen(int i) const { return frozen_[i]; }

  Eigen::VectorXd to_scaled(const Eigen::VectorXd& v) const;
  Eigen::VectorXd to_physical(const Eigen::VectorXd& z) const;

 private:
  Eigen::VectorXd scale_;
  Eigen::VectorXd offset_;
  std::vector<bool> frozen_;
};

struct ProblemScaling {
  ScalingMap state;
  ScalingMap control;
};

/// State maps are 14-dimensional for CT (y over [0, violation_scale]) and
/// 13-dimensional for DT; controls include the dilation s.
ProblemScaling build_scaling(const Scenario& sc, Method method);

struct SubproblemOptions {
  /// Whether the solver sees scaled coordinates. Penalties are defined in
  /// scaled units either way, so the minimizer does not depend on this.
  bool use_scaled_variables = true;
};

/// Variable indices of a built subproblem.
struct SubproblemLayout {
  int nodes = 0;
  int nx = 0;
  int nu = 0;
  int states = 0;    // x_k[i] at states + k·nx + i
  int controls = 0;  // u_k[j] at controls + k·nu + j
  int vc_plus = 0;   // ν⁺_k[i] at vc_plus + k·nx + i, k < nodes − 1
  int vc_minus = 0;
  int fuel = -1;     // η_k, min-fuel only
  int buffers = -1;  // DT buffer values, then their epigraphs
  int buffer_count = 0;
  int buffer_epigraph = -1;

  int x(int k, int i) const { return states + k * nx + i; }
  int u(int k, int j) const { return controls + k * nu + j; }
};

struct BuiltSubproblem {
  Method method = Method::kCt;
  ConicProgram program;
  SubproblemLayout layout;
  ProblemScaling scaling;
  std::vector<std::string> buffer_labels;  // "los k=.. kp=.." / "range k=.. kp=.."
};

/// Augmented-state subproblem about `ref` (14-state) with discretization
/// `disc` computed on AugmentedDynamics.
BuiltSubproblem build_ct_subproblem(const Trajectory& ref, const Discretization& disc,
                                    const Weights& w, const Scenario& sc,
                                    const SubproblemOptions& opts = {});

/// Nodal baseline about `ref` (13-state) with `disc` from DilatedDynamics.
BuiltSubproblem build_dt_subproblem(const Trajectory& ref, const Discretization& disc,
                                    const Weights& w, const Scenario& sc,
                                    const SubproblemOptions& opts = {});

struct SubproblemSolution {
  ConicStatus status = ConicStatus::kNumericalFailure;
  Trajectory trajectory;                      // physical units
  std::vector<Eigen::VectorXd> virtual_control;  // ν_k in scaled units, per interval
  Eigen::VectorXd buffers;                    // DT buffer values (may be negative)
  double vc_l1 = 0.0;                         // ‖ν‖₁
  double vb_l1 = 0.0;                         // Σ max{0, buffer}
  double objective = 0.0;
  int solver_iterations = 0;
  double solve_time = 0.0;
  std::string detail;
};

SubproblemSolution solve_subproblem(const BuiltSubproblem& sp, const ConicSettings& settings = {});

/// Nominal size of L_f: the horizon guess for min-time, hover fuel
/// m‖g‖·t for min-fuel. The subproblem objective is λ_obj·L_f / this.
double objective_normalization(const Scenario& sc);

/// Node times of a reference, from its dilation channel.
std::vector<double> reference_times(const Trajectory& ref);

}  // namespace losg
