#include "losg/subproblem.hpp"

#include <cmath>
#include <limits>

#include "losg/errors.hpp"
#include "losg/los.hpp"

namespace losg {

using namespace layout;

const char* to_string(Method m) { return m == Method::kCt ? "CT" : "DT"; }

std::optional<Method> parse_method(const std::string& s) {
  if (s == "ct" || s == "CT") return Method::kCt;
  if (s == "dt" || s == "DT") return Method::kDt;
  return std::nullopt;
}

ScalingMap::ScalingMap(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  if (lower.size() != upper.size()) throw InvalidInput("ScalingMap: bound size mismatch");
  const int n = static_cast<int>(lower.size());
  scale_.setOnes(n);
  offset_.setZero(n);
  frozen_.assign(n, false);
  for (int i = 0; i < n; ++i) {
    const double lo = lower[i];
    const double hi = upper[i];
    if (!std::isfinite(lo) || !std::isfinite(hi)) continue;
    if (lo > hi) throw InvalidInput("ScalingMap: min > max at component " + std::to_string(i));
    if (lo == hi) {
      frozen_[i] = true;
      offset_[i] = lo;
      continue;
    }
    scale_[i] = 0.5 * (hi - lo);
    offset_[i] = 0.5 * (hi + lo);
  }
}

ScalingMap ScalingMap::identity(int n) {
  const double inf = std::numeric_limits<double>::infinity();
  return ScalingMap(Eigen::VectorXd::Constant(n, -inf), Eigen::VectorXd::Constant(n, inf));
}

Eigen::VectorXd ScalingMap::to_scaled(const Eigen::VectorXd& v) const {
  return (v - offset_).cwiseQuotient(scale_);
}

Eigen::VectorXd ScalingMap::to_physical(const Eigen::VectorXd& z) const {
  return z.cwiseProduct(scale_) + offset_;
}

ProblemScaling build_scaling(const Scenario& sc, Method method) {
  const int nx = method == Method::kCt ? kAugStateDim : kStateDim;
  Eigen::VectorXd xlo(nx), xhi(nx);
  xlo.head<kStateDim>() = sc.bounds.state_min;
  xhi.head<kStateDim>() = sc.bounds.state_max;
  if (method == Method::kCt) {
    xlo[kViolation] = 0.0;
    xhi[kViolation] = sc.bounds.violation_scale;
  }
  Eigen::VectorXd ulo(kAugControlDim), uhi(kAugControlDim);
  ulo.head<kControlDim>() = sc.bounds.control_min;
  uhi.head<kControlDim>() = sc.bounds.control_max;
  const auto [smin, smax] = sc.dilation_bounds();
  ulo[kDilation] = smin;
  uhi[kDilation] = smax;
  return {ScalingMap(xlo, xhi), ScalingMap(ulo, uhi)};
}

double objective_normalization(const Scenario& sc) {
  const double t = sc.horizon_guess();
  if (sc.objective == ObjectiveKind::kMinTime) return t;
  return sc.vehicle.mass() * sc.vehicle.gravity().norm() * t;
}

std::vector<double> reference_times(const Trajectory& ref) {
  return node_times(ref.controls, kDilation, 0.0);
}

namespace {

bool finite(double v) { return std::isfinite(v); }

// Adds lo ≤ e ≤ hi, as an equality when the bounds coincide.
void add_box(ConicProgram& p, AffineExpr e, double lo, double hi, RowTag tag) {
  if (finite(lo) && finite(hi) && lo == hi) {
    e.constant -= lo;
    p.add_equality(e, tag);
    return;
  }
  if (finite(hi)) {
    AffineExpr up = e;
    up.constant -= hi;
    p.add_inequality(up, tag);
  }
  if (finite(lo)) {
    AffineExpr down;
    for (const LinearTerm& t : e.terms) down.add(t.var, -t.coef);
    down.constant = lo - e.constant;
    p.add_inequality(down, tag);
  }
}

void check_inputs(const Trajectory& ref, const Discretization& disc, int nx, const Scenario& sc) {
  const int n = ref.nodes();
  if (n < 2) throw InvalidInput("subproblem: reference needs at least two nodes");
  if (static_cast<int>(ref.controls.size()) != n) {
    throw InvalidInput("subproblem: state/control node count mismatch");
  }
  for (int k = 0; k < n; ++k) {
    if (ref.states[k].size() != nx || ref.controls[k].size() != kAugControlDim) {
      throw InvalidInput("subproblem: reference dimension mismatch at node " + std::to_string(k));
    }
  }
  if (static_cast<int>(disc.intervals.size()) != n - 1) {
    throw InvalidInput("subproblem: discretization has " + std::to_string(disc.intervals.size()) +
                       " intervals, expected " + std::to_string(n - 1));
  }
  for (const IntervalDiscretization& d : disc.intervals) {
    if (d.A.rows() != nx || d.A.cols() != nx || d.B_minus.rows() != nx ||
        d.B_minus.cols() != kAugControlDim || d.B_plus.rows() != nx ||
        d.B_plus.cols() != kAugControlDim || d.propagated.size() != nx) {
      throw InvalidInput("subproblem: discretization dimension mismatch");
    }
  }
  for (const Gate& g : sc.gates) {
    if (g.node < 0 || g.node >= n) throw InvalidInput("subproblem: gate node outside grid");
  }
}

// Variables, trust region, dynamics with virtual control, boundary
// conditions, control boxes, gates, max-range cones and the objective.
BuiltSubproblem build_common(Method method, const Trajectory& ref, const Discretization& disc,
                             const Weights& w, const Scenario& sc,
                             const SubproblemOptions& opts) {
  const int nx = method == Method::kCt ? kAugStateDim : kStateDim;
  const int nu = kAugControlDim;
  check_inputs(ref, disc, nx, sc);
  w.validate();

  BuiltSubproblem out;
  out.method = method;
  out.scaling = build_scaling(sc, method);
  const ScalingMap& xs = out.scaling.state;
  const ScalingMap& us = out.scaling.control;
  ConicProgram& p = out.program;
  SubproblemLayout& L = out.layout;

  const int n = ref.nodes();
  L.nodes = n;
  L.nx = nx;
  L.nu = nu;
  L.states = p.add_variables(n * nx, "state");
  L.controls = p.add_variables(n * nu, "control");
  L.vc_plus = p.add_variables((n - 1) * nx, "virtual_control+");
  L.vc_minus = p.add_variables((n - 1) * nx, "virtual_control-");

  if (opts.use_scaled_variables) {
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < nx; ++i) p.set_map(L.x(k, i), xs.scale(i), xs.offset(i));
      for (int j = 0; j < nu; ++j) p.set_map(L.u(k, j), us.scale(j), us.offset(j));
    }
  }

  // Proximal term ‖ξ̂ − ξ̂_ref‖² in scaled units.
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < nx; ++i) {
      AffineExpr e(-ref.states[k][i] / xs.scale(i));
      e.add(L.x(k, i), 1.0 / xs.scale(i));
      p.add_squared_cost(e, w.trust_region);
    }
    for (int j = 0; j < nu; ++j) {
      AffineExpr e(-ref.controls[k][j] / us.scale(j));
      e.add(L.u(k, j), 1.0 / us.scale(j));
      p.add_squared_cost(e, w.trust_region);
    }
  }

  // x_{k+1} = x_prop + Ā(x_k − x̄_k) + B⁻(u_k − ū_k) + B⁺(u_{k+1} − ū_{k+1}) + Dν_k,
  // each row divided by its state scale D_i.
  constexpr double kDrop = 1e-14;
  for (int k = 0; k < n - 1; ++k) {
    const IntervalDiscretization& d = disc.intervals[k];
    const Eigen::VectorXd c = d.propagated - d.A * ref.states[k] - d.B_minus * ref.controls[k] -
                              d.B_plus * ref.controls[k + 1];
    for (int i = 0; i < nx; ++i) {
      const double inv = 1.0 / xs.scale(i);
      AffineExpr e(-c[i] * inv);
      e.add(L.x(k + 1, i), inv);
      for (int j = 0; j < nx; ++j) {
        if (std::abs(d.A(i, j)) > kDrop) e.add(L.x(k, j), -d.A(i, j) * inv);
      }
      for (int j = 0; j < nu; ++j) {
        if (std::abs(d.B_minus(i, j)) > kDrop) e.add(L.u(k, j), -d.B_minus(i, j) * inv);
        if (std::abs(d.B_plus(i, j)) > kDrop) e.add(L.u(k + 1, j), -d.B_plus(i, j) * inv);
      }
      e.add(L.vc_plus + k * nx + i, -1.0);
      e.add(L.vc_minus + k * nx + i, 1.0);
      p.add_equality(e, RowTag::kDynamics);
    }
  }
  for (int v = 0; v < (n - 1) * nx; ++v) {
    for (int base : {L.vc_plus, L.vc_minus}) {
      p.add_inequality(AffineExpr().add(base + v, -1.0), RowTag::kVirtualControl);
      p.add_linear_cost(base + v, w.virtual_control);
    }
  }

  // Boundary conditions; y_0 = 0 for the augmented state.
  for (int i = 0; i < nx; ++i) {
    const double target = i < kStateDim ? sc.initial_state[i] : 0.0;
    p.add_equality(AffineExpr(-target).add(L.x(0, i), 1.0), RowTag::kInitial);
  }
  if (sc.final_state) {
    for (int i = 0; i < kStateDim; ++i) {
      if (!sc.final_mask[i]) continue;
      p.add_equality(AffineExpr(-(*sc.final_state)[i]).add(L.x(n - 1, i), 1.0),
                     RowTag::kTerminal);
    }
  }

  // Nodal control boxes, exact for a first-order hold.
  const auto [smin, smax] = sc.dilation_bounds();
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < kControlDim; ++j) {
      add_box(p, AffineExpr().add(L.u(k, j), 1.0), sc.bounds.control_min[j],
              sc.bounds.control_max[j], RowTag::kControlBox);
    }
    add_box(p, AffineExpr().add(L.u(k, kDilation), 1.0), smin, smax, RowTag::kControlBox);
  }

  for (const Gate& g : sc.gates) {
    for (const GateRow& row : gate_constraints(g)) {
      AffineExpr e;
      for (int a = 0; a < 3; ++a) e.add(L.x(g.node, kPosition + a), row.coeff[a]);
      add_box(p, e, row.lower, row.upper, RowTag::kGate);
    }
  }

  const std::vector<double> times = reference_times(ref);
  if (sc.range && std::isfinite(sc.range->max)) {
    for (int k = 0; k < n; ++k) {
      for (const Keypoint& kp : sc.keypoints) {
        const Vec3 pk = keypoint_position(kp, times[k]);
        std::vector<AffineExpr> el(3);
        for (int a = 0; a < 3; ++a) el[a] = AffineExpr(-pk[a]).add(L.x(k, kPosition + a), 1.0);
        p.add_second_order_cone(AffineExpr(sc.range->max), el, RowTag::kRangeCone);
      }
    }
  }

  // Objective, trapezoidal in τ and divided by its nominal magnitude.
  const double dtau = 1.0 / (n - 1);
  const double lf = w.objective / objective_normalization(sc);
  auto weight = [&](int k) { return (k == 0 || k == n - 1 ? 0.5 : 1.0) * dtau * lf; };
  if (sc.objective == ObjectiveKind::kMinTime) {
    for (int k = 0; k < n; ++k) p.add_linear_cost(L.u(k, kDilation), weight(k));
  } else {
    L.fuel = p.add_variables(n, "fuel_epigraph");
    for (int k = 0; k < n; ++k) {
      std::vector<AffineExpr> el(kControlDim);
      for (int j = 0; j < kControlDim; ++j) el[j] = AffineExpr().add(L.u(k, j), 1.0);
      p.add_second_order_cone(AffineExpr().add(L.fuel + k, 1.0), el, RowTag::kFuelCone);
      p.add_linear_cost(L.fuel + k, weight(k) * ref.controls[k][kDilation]);
    }
  }
  return out;
}

}  // namespace

BuiltSubproblem build_ct_subproblem(const Trajectory& ref, const Discretization& disc,
                                    const Weights& w, const Scenario& sc,
                                    const SubproblemOptions& opts) {
  BuiltSubproblem out = build_common(Method::kCt, ref, disc, w, sc, opts);
  const SubproblemLayout& L = out.layout;
  for (int k = 1; k < L.nodes; ++k) {
    AffineExpr e(-w.licq);
    e.add(L.x(k, kViolation), 1.0).add(L.x(k - 1, kViolation), -1.0);
    out.program.add_inequality(e, RowTag::kLicq);
  }
  return out;
}

BuiltSubproblem build_dt_subproblem(const Trajectory& ref, const Discretization& disc,
                                    const Weights& w, const Scenario& sc,
                                    const SubproblemOptions& opts) {
  BuiltSubproblem out = build_common(Method::kDt, ref, disc, w, sc, opts);
  ConicProgram& p = out.program;
  SubproblemLayout& L = out.layout;
  const int n = L.nodes;

  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < kStateDim; ++i) {
      add_box(p, AffineExpr().add(L.x(k, i), 1.0), sc.bounds.state_min[i],
              sc.bounds.state_max[i], RowTag::kStateBox);
    }
  }

  // Linearized nonconvex path constraints g(x̄) + ∇g·(x − x̄) = ν at every
  // free node (node 0 is pinned by the initial condition).
  struct Row {
    int node;
    double value;
    StateVector gradient;
    RowTag tag;
    std::string label;
  };
  std::vector<Row> rows;
  const std::vector<double> times = reference_times(ref);
  for (int k = 1; k < n; ++k) {
    const StateVector xk = ref.states[k].head<kStateDim>();
    for (std::size_t l = 0; l < sc.keypoints.size(); ++l) {
      const LosEvaluation g = los_residual_full(xk, times[k], sc.keypoints[l], sc.cone);
      rows.push_back({k, g.value, g.gradient, RowTag::kLosBuffer,
                      "los k=" + std::to_string(k) + " kp=" + std::to_string(l)});
    }
    if (sc.range && sc.range->min > 0.0) {
      for (std::size_t l = 0; l < sc.keypoints.size(); ++l) {
        const Vec3 d = xk.segment<3>(kPosition) - keypoint_position(sc.keypoints[l], times[k]);
        const double dist = d.norm();
        StateVector grad = StateVector::Zero();
        if (dist > 0.0) grad.segment<3>(kPosition) = -d / dist;
        rows.push_back({k, sc.range->min - dist, grad, RowTag::kRangeBuffer,
                        "range k=" + std::to_string(k) + " kp=" + std::to_string(l)});
      }
    }
  }

  L.buffer_count = static_cast<int>(rows.size());
  L.buffers = p.add_variables(L.buffer_count, "virtual_buffer");
  L.buffer_epigraph = p.add_variables(L.buffer_count, "virtual_buffer_epigraph");
  for (int b = 0; b < L.buffer_count; ++b) {
    const Row& r = rows[b];
    const StateVector& xbar = ref.states[r.node].head<kStateDim>();
    AffineExpr e(r.value - r.gradient.dot(xbar));
    for (int i = 0; i < kStateDim; ++i) {
      if (r.gradient[i] != 0.0) e.add(L.x(r.node, i), r.gradient[i]);
    }
    e.add(L.buffers + b, -1.0);
    p.add_equality(e, r.tag);

    // e_b ≥ max{0, ν_b}
    p.add_inequality(AffineExpr().add(L.buffers + b, 1.0).add(L.buffer_epigraph + b, -1.0),
                     RowTag::kBufferEpigraph);
    p.add_inequality(AffineExpr().add(L.buffer_epigraph + b, -1.0), RowTag::kBufferEpigraph);
    p.add_linear_cost(L.buffer_epigraph + b, w.virtual_buffer);
    out.buffer_labels.push_back(r.label);
  }
  return out;
}

SubproblemSolution solve_subproblem(const BuiltSubproblem& sp, const ConicSettings& settings) {
  const ConicSolution sol = solve_conic(sp.program, settings);
  const SubproblemLayout& L = sp.layout;

  SubproblemSolution out;
  out.status = sol.status;
  out.objective = sol.objective;
  out.solver_iterations = sol.iterations;
  out.solve_time = sol.solve_time;
  out.detail = sol.detail;
  if (!usable(sol.status)) return out;

  const Eigen::VectorXd& v = sol.values;
  for (int k = 0; k < L.nodes; ++k) {
    out.trajectory.states.push_back(v.segment(L.x(k, 0), L.nx));
    out.trajectory.controls.push_back(v.segment(L.u(k, 0), L.nu));
  }
  for (int k = 0; k < L.nodes - 1; ++k) {
    const Eigen::VectorXd nu_k =
        v.segment(L.vc_plus + k * L.nx, L.nx) - v.segment(L.vc_minus + k * L.nx, L.nx);
    out.vc_l1 += nu_k.lpNorm<1>();
    out.virtual_control.push_back(nu_k);
  }
  if (L.buffer_count > 0) {
    out.buffers = v.segment(L.buffers, L.buffer_count);
    out.vb_l1 = out.buffers.cwiseMax(0.0).sum();
  } else {
    out.buffers.resize(0);
  }
  return out;
}

}  // namespace losg
