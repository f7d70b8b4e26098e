#pragma once

#include <memory>
#include <string>
#include <vector>

#include "losg/conic.hpp"
#include "losg/dilated_dynamics.hpp"
#include "losg/discretizer.hpp"
#include "losg/scenario.hpp"
#include "losg/subproblem.hpp"

namespace losg {

struct SolveOptions {
  Method method = Method::kCt;
  Weights weights;
  Tolerances tolerances;
  int substeps = 15;
  int dense_samples = 1000;
  bool use_scaling = true;
  ConicSettings conic;

  /// Weights, tolerances and discretization settings taken from `sc`.
  static SolveOptions from_scenario(const Scenario& sc, Method method);
  void validate() const;
};

struct IterationLog {
  int iteration = 0;            // 1-based
  double trust_region = 0.0;    // ‖ξ̂ − ξ̂_ref‖₂² over all nodes, scaled units
  double vc_l1 = 0.0;
  double vb_l1 = 0.0;
  double objective = 0.0;       // subproblem objective
  double max_defect = 0.0;      // of the reference it was linearized about
  double wall_time = 0.0;       // s, discretize + build + solve
  ConicStatus status = ConicStatus::kNumericalFailure;
  int solver_iterations = 0;
};

struct SolveLog {
  std::vector<IterationLog> iterations;
  double runtime = 0.0;  // s
  bool converged = false;
  std::string failure;   // non-empty when a subproblem could not be solved

  int iteration_count() const { return static_cast<int>(iterations.size()); }
};

struct SolveResult {
  Trajectory trajectory;  // last iterate, method-native state dimension
  SolveLog log;
};

/// Dynamics model matching the method's state: augmented for CT, vehicle
/// state with dilation for DT.
std::unique_ptr<DynamicsModel> make_model(const Scenario& sc, Method method);

/// Straight-line (or gate-to-gate) positions with finite-difference
/// velocities, attitude interpolated between the boundary attitudes, zero
/// rates, hover thrust and uniform dilation.
Trajectory initial_reference(const Scenario& sc, Method method);

/// The continuation test G: true while any measure exceeds its tolerance.
/// The buffer clause only applies to DT.
bool continue_iterating(double trust_region, double vc_l1, double vb_l1, const Tolerances& tol,
                        Method method);

/// Squared distance in scaled coordinates between two trajectories.
double trust_region_distance(const Trajectory& a, const Trajectory& b,
                             const ProblemScaling& scaling);

/// Prox-linear iterations from the initial reference until G clears or
/// the iteration cap is reached.
SolveResult solve(const Scenario& sc, const SolveOptions& opts);
/// Same, from a caller-supplied reference.
SolveResult solve_from(const Scenario& sc, const SolveOptions& opts, Trajectory reference);

}  // namespace losg
