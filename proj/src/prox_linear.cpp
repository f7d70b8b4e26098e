#include "losg/prox_linear.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "losg/errors.hpp"

namespace losg {

using namespace layout;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

UnitQuaternion slerp(const UnitQuaternion& a, UnitQuaternion b, double t) {
  double c = a.coeffs().dot(b.coeffs());
  if (c < 0.0) {
    b = UnitQuaternion(-b.coeffs());
    c = -c;
  }
  if (c > 1.0 - 1e-12) return UnitQuaternion((1.0 - t) * a.coeffs() + t * b.coeffs()).normalized();
  const double th = std::acos(c);
  const Vec4 q = (std::sin((1.0 - t) * th) * a.coeffs() + std::sin(t * th) * b.coeffs()) /
                 std::sin(th);
  return UnitQuaternion(q).normalized();
}

}  // namespace

SolveOptions SolveOptions::from_scenario(const Scenario& sc, Method method) {
  SolveOptions o;
  o.method = method;
  o.weights = sc.weights;
  o.tolerances = sc.tolerances;
  o.substeps = sc.substeps;
  o.dense_samples = sc.dense_samples;
  return o;
}

void SolveOptions::validate() const {
  weights.validate();
  tolerances.validate();
  if (substeps < 1) throw ValidationError("substeps", "must be at least 1");
  if (dense_samples < 2) throw ValidationError("dense_samples", "must be at least 2");
}

std::unique_ptr<DynamicsModel> make_model(const Scenario& sc, Method method) {
  if (method == Method::kCt) return std::make_unique<AugmentedDynamics>(sc);
  return std::make_unique<DilatedDynamics>(sc.vehicle);
}

Trajectory initial_reference(const Scenario& sc, Method method) {
  const int n = sc.nodes;
  const int nx = method == Method::kCt ? kAugStateDim : kStateDim;
  const Vec3 r0 = sc.initial_state.segment<3>(kPosition);
  const auto pinned = [&](int i) { return sc.final_state && sc.final_mask[i]; };

  // Position waypoints at fixed nodes: start, gates in order, end.
  std::vector<std::pair<int, Vec3>> way{{0, r0}};
  for (const Gate& g : sc.gates) way.emplace_back(g.node, g.center);
  Vec3 rf = way.back().second;
  for (int a = 0; a < 3; ++a) {
    if (pinned(kPosition + a)) rf[a] = (*sc.final_state)[kPosition + a];
  }
  if (way.back().first != n - 1) way.emplace_back(n - 1, rf);

  std::vector<Vec3> r(n, r0);
  for (std::size_t s = 0; s + 1 < way.size(); ++s) {
    const auto& [ka, ra] = way[s];
    const auto& [kb, rb] = way[s + 1];
    for (int k = ka; k <= kb; ++k) {
      const double t = kb == ka ? 0.0 : static_cast<double>(k - ka) / (kb - ka);
      r[k] = (1.0 - t) * ra + t * rb;
    }
  }

  const auto [smin, smax] = sc.dilation_bounds();
  const double s = std::clamp(sc.horizon_guess(), smin, smax);
  const double dt = s / (n - 1);

  const UnitQuaternion q0(Vec4(sc.initial_state.segment<4>(kQuaternion)));
  UnitQuaternion qf = q0;
  bool attitude_pinned = true;
  for (int i = 0; i < 4; ++i) attitude_pinned = attitude_pinned && pinned(kQuaternion + i);
  if (attitude_pinned) qf = UnitQuaternion(Vec4(sc.final_state->segment<4>(kQuaternion)));

  Trajectory ref;
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(nx);
    x.segment<3>(kPosition) = r[k];
    const int a = k < n - 1 ? k : k - 1;
    x.segment<3>(kVelocity) = (r[a + 1] - r[a]) / dt;
    const UnitQuaternion q = slerp(q0, qf, static_cast<double>(k) / (n - 1));
    x.segment<4>(kQuaternion) = q.coeffs();
    ref.states.push_back(x);

    Eigen::VectorXd u = Eigen::VectorXd::Zero(kAugControlDim);
    const Vec3 hover = -sc.vehicle.mass() * sc.vehicle.gravity();
    u.segment<3>(kThrust) = quat_to_dcm(q).transpose() * hover;
    for (int j = 0; j < kControlDim; ++j) {
      u[j] = std::clamp(u[j], sc.bounds.control_min[j], sc.bounds.control_max[j]);
    }
    u[kDilation] = s;
    ref.controls.push_back(u);
  }
  // Boundary nodes carry the exact boundary values.
  ref.states.front().head<kStateDim>() = sc.initial_state;
  if (sc.final_state) {
    for (int i = 0; i < kStateDim; ++i) {
      if (pinned(i)) ref.states.back()[i] = (*sc.final_state)[i];
    }
  }
  return ref;
}

bool continue_iterating(double trust_region, double vc_l1, double vb_l1, const Tolerances& tol,
                        Method method) {
  if (trust_region > tol.trust_region) return true;
  if (vc_l1 > tol.virtual_control) return true;
  return method == Method::kDt && vb_l1 > tol.virtual_buffer;
}

double trust_region_distance(const Trajectory& a, const Trajectory& b,
                             const ProblemScaling& scaling) {
  if (a.nodes() != b.nodes()) throw InvalidInput("trust_region_distance: node count mismatch");
  double d = 0.0;
  for (int k = 0; k < a.nodes(); ++k) {
    d += (scaling.state.to_scaled(a.states[k]) - scaling.state.to_scaled(b.states[k]))
             .squaredNorm();
    d += (scaling.control.to_scaled(a.controls[k]) - scaling.control.to_scaled(b.controls[k]))
             .squaredNorm();
  }
  return d;
}

SolveResult solve(const Scenario& sc, const SolveOptions& opts) {
  return solve_from(sc, opts, initial_reference(sc, opts.method));
}

SolveResult solve_from(const Scenario& sc, const SolveOptions& opts, Trajectory reference) {
  opts.validate();
  sc.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::unique_ptr<DynamicsModel> model = make_model(sc, opts.method);
  const ProblemScaling scaling = build_scaling(sc, opts.method);
  SubproblemOptions sub_opts;
  sub_opts.use_scaled_variables = opts.use_scaling;

  SolveResult result;
  result.trajectory = std::move(reference);
  SolveLog& log = result.log;

  const int k_max = opts.tolerances.max_iterations;
  for (int k = 1; k <= k_max; ++k) {
    const auto t_iter = std::chrono::steady_clock::now();
    IterationLog it;
    it.iteration = k;

    Discretization disc;
    try {
      disc = discretize(*model, result.trajectory, opts.substeps);
    } catch (const NumericalFailure& e) {
      log.failure = std::string("discretization: ") + e.what();
      break;
    }
    it.max_defect = disc.max_defect();

    const BuiltSubproblem sp =
        opts.method == Method::kCt
            ? build_ct_subproblem(result.trajectory, disc, opts.weights, sc, sub_opts)
            : build_dt_subproblem(result.trajectory, disc, opts.weights, sc, sub_opts);
    const SubproblemSolution sol = solve_subproblem(sp, opts.conic);
    it.status = sol.status;
    it.solver_iterations = sol.solver_iterations;
    it.objective = sol.objective;
    if (!usable(sol.status)) {
      it.wall_time = seconds_since(t_iter);
      log.iterations.push_back(it);
      log.failure = std::string("subproblem ") + to_string(sol.status) + " (" + sol.detail + ")";
      break;
    }

    it.trust_region = trust_region_distance(sol.trajectory, result.trajectory, scaling);
    it.vc_l1 = sol.vc_l1;
    it.vb_l1 = sol.vb_l1;
    it.wall_time = seconds_since(t_iter);
    log.iterations.push_back(it);

    result.trajectory = sol.trajectory;
    if (!continue_iterating(it.trust_region, it.vc_l1, it.vb_l1, opts.tolerances, opts.method)) {
      log.converged = true;
      break;
    }
  }
  log.runtime = seconds_since(start);
  return result;
}

}  // namespace losg
