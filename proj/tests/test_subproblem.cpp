#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "losg/errors.hpp"
#include "losg/prox_linear.hpp"
#include "losg/subproblem.hpp"

namespace losg {
namespace {

using namespace layout;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(ScalingMap, SymmetricAndOffsetBounds) {
  const ScalingMap m((VectorXd(3) << -5, 0, -kInf).finished(), (VectorXd(3) << 5, 10, kInf).finished());
  EXPECT_EQ(m.scale(0), 5.0);
  EXPECT_EQ(m.offset(0), 0.0);
  const VectorXd z = m.to_scaled((VectorXd(3) << 5, 5, 7).finished());
  EXPECT_DOUBLE_EQ(z[0], 1.0);
  EXPECT_DOUBLE_EQ(z[1], 0.0);
  EXPECT_DOUBLE_EQ(z[2], 7.0);
  EXPECT_DOUBLE_EQ(m.to_scaled((VectorXd(3) << -5, 0, 0).finished())[1], -1.0);
}

TEST(ScalingMap, FrozenComponent) {
  const ScalingMap m((VectorXd(2) << 2, -1).finished(), (VectorXd(2) << 2, 1).finished());
  EXPECT_TRUE(m.frozen(0));
  EXPECT_FALSE(m.frozen(1));
  EXPECT_EQ(m.scale(0), 1.0);
  EXPECT_DOUBLE_EQ(m.to_scaled((VectorXd(2) << 2, 0).finished())[0], 0.0);
  EXPECT_THROW(ScalingMap((VectorXd(1) << 1).finished(), (VectorXd(1) << 0).finished()), InvalidInput);
}

TEST(ScalingMap, RoundTrip) {
  const ScalingMap m = build_scaling(relative_nav_default(), Method::kCt).state;
  std::mt19937 rng(3);
  std::normal_distribution<double> n(0.0, 4.0);
  for (int i = 0; i < 20; ++i) {
    const VectorXd v = VectorXd::NullaryExpr(kAugStateDim, [&] { return n(rng); });
    EXPECT_LT((m.to_physical(m.to_scaled(v)) - v).norm(), 1e-12 * (1 + v.norm()));
  }
}

TEST(BuildScaling, DimensionsAndViolationRange) {
  const Scenario sc = relative_nav_default();
  const ProblemScaling ct = build_scaling(sc, Method::kCt);
  const ProblemScaling dt = build_scaling(sc, Method::kDt);
  EXPECT_EQ(ct.state.size(), kAugStateDim);
  EXPECT_EQ(dt.state.size(), kStateDim);
  EXPECT_EQ(ct.control.size(), kAugControlDim);
  EXPECT_DOUBLE_EQ(ct.state.to_scaled(VectorXd::Constant(kAugStateDim, 0.0))[kViolation], -1.0);
  EXPECT_DOUBLE_EQ(ct.control.scale(kDilation), 0.5 * (sc.bounds.dilation_max - sc.bounds.dilation_min));
  EXPECT_TRUE(build_scaling(cinematography_default(), Method::kCt).control.frozen(kDilation));
}

TEST(ObjectiveNormalization, NominalMagnitudes) {
  const Scenario nav = relative_nav_default();
  EXPECT_DOUBLE_EQ(objective_normalization(nav), nav.time_guess);
  const Scenario cine = cinematography_default();
  EXPECT_DOUBLE_EQ(objective_normalization(cine),
                   cine.vehicle.mass() * cine.vehicle.gravity().norm() * *cine.final_time);
}

struct Built {
  Trajectory ref;
  Discretization disc;
  BuiltSubproblem sp;
};

Built build(const Scenario& sc, Method method, const Weights& w, Trajectory ref,
            const SubproblemOptions& opts = {}) {
  const auto model = make_model(sc, method);
  Built b{std::move(ref), {}, {}};
  b.disc = discretize(*model, b.ref, sc.substeps);
  b.sp = method == Method::kCt ? build_ct_subproblem(b.ref, b.disc, w, sc, opts)
                               : build_dt_subproblem(b.ref, b.disc, w, sc, opts);
  return b;
}

Built build(const Scenario& sc, Method method) {
  return build(sc, method, sc.weights, initial_reference(sc, method));
}

// Rows an lo ≤ v ≤ hi box contributes: one equality when pinned, else one
// inequality per finite side.
int box_rows(double lo, double hi) {
  if (std::isfinite(lo) && std::isfinite(hi) && lo == hi) return 1;
  return (std::isfinite(lo) ? 1 : 0) + (std::isfinite(hi) ? 1 : 0);
}

TEST(Subproblem, RowAuditCtVersusDt) {
  for (const Scenario& sc : {relative_nav_default(), cinematography_default()}) {
    const int N = sc.nodes;
    const int K = static_cast<int>(sc.keypoints.size());
    const int G = static_cast<int>(sc.gates.size());
    int control_rows = 0;
    for (int j = 0; j < kControlDim; ++j) control_rows += box_rows(sc.bounds.control_min[j], sc.bounds.control_max[j]);
    const auto [smin, smax] = sc.dilation_bounds();
    control_rows += box_rows(smin, smax);
    int state_rows = 0;
    for (int i = 0; i < kStateDim; ++i) state_rows += box_rows(sc.bounds.state_min[i], sc.bounds.state_max[i]);
    int terminal = 0;
    if (sc.final_state)
      for (bool m : sc.final_mask) terminal += m ? 1 : 0;
    const bool min_range = sc.range && sc.range->min > 0.0;
    const bool max_range = sc.range && std::isfinite(sc.range->max);

    const Built ct = build(sc, Method::kCt);
    const Built dt = build(sc, Method::kDt);
    const ConicProgram& pc = ct.sp.program;
    const ConicProgram& pd = dt.sp.program;

    EXPECT_EQ(pc.rows(RowTag::kDynamics), (N - 1) * kAugStateDim) << sc.name;
    EXPECT_EQ(pd.rows(RowTag::kDynamics), (N - 1) * kStateDim);
    EXPECT_EQ(pc.rows(RowTag::kLicq), N - 1);
    EXPECT_EQ(pd.rows(RowTag::kLicq), 0);
    EXPECT_EQ(pc.rows(RowTag::kInitial), kAugStateDim);
    EXPECT_EQ(pd.rows(RowTag::kInitial), kStateDim);
    EXPECT_EQ(pc.rows(RowTag::kTerminal), terminal);
    EXPECT_EQ(pd.rows(RowTag::kTerminal), terminal);
    EXPECT_EQ(pc.rows(RowTag::kControlBox), N * control_rows);
    EXPECT_EQ(pd.rows(RowTag::kControlBox), N * control_rows);
    EXPECT_EQ(pc.rows(RowTag::kStateBox), 0);
    EXPECT_EQ(pd.rows(RowTag::kStateBox), N * state_rows);
    EXPECT_EQ(pc.rows(RowTag::kGate), 5 * G);
    EXPECT_EQ(pd.rows(RowTag::kGate), 5 * G);
    EXPECT_EQ(pc.rows(RowTag::kLosBuffer), 0);
    EXPECT_EQ(pd.rows(RowTag::kLosBuffer), (N - 1) * K);
    EXPECT_EQ(pd.rows(RowTag::kRangeBuffer), min_range ? (N - 1) * K : 0);
    EXPECT_EQ(pd.rows(RowTag::kBufferEpigraph), 2 * dt.sp.layout.buffer_count);
    EXPECT_EQ(dt.sp.layout.buffer_count, (N - 1) * K * (min_range ? 2 : 1));
    EXPECT_EQ(pc.rows(RowTag::kVirtualControl), 2 * (N - 1) * kAugStateDim);
    EXPECT_EQ(pd.rows(RowTag::kVirtualControl), 2 * (N - 1) * kStateDim);
    EXPECT_EQ(pc.rows(RowTag::kRangeCone), max_range ? 4 * N * K : 0);
    EXPECT_EQ(pd.rows(RowTag::kRangeCone), pc.rows(RowTag::kRangeCone));
    const int fuel = sc.objective == ObjectiveKind::kMinFuel ? N * (kControlDim + 1) : 0;
    EXPECT_EQ(pc.rows(RowTag::kFuelCone), fuel);
    EXPECT_EQ(pd.rows(RowTag::kFuelCone), fuel);
    EXPECT_EQ(static_cast<int>(dt.sp.buffer_labels.size()), dt.sp.layout.buffer_count);
  }
}

// A static subject held in view from a hover at (0, 0, 2): 6 m ahead and
// 30° down, on the boresight of the pitched camera.
Scenario hover_scene() {
  Scenario sc = cinematography_default();
  sc.keypoints = {Keypoint::fixed(Vec3(6.0, 0.0, 2.0 - 6.0 * std::tan(M_PI / 6)))};
  sc.set_nodes(6);
  return sc;
}

// Reference whose nodes come from chaining the discretizer's own endpoints,
// so the linearized dynamics hold with ν = 0.
Trajectory consistent_reference(const Scenario& sc, Method method) {
  const auto model = make_model(sc, method);
  Trajectory ref = initial_reference(sc, method);
  const TimeGrid grid(ref.nodes());
  const std::vector<double> times = reference_times(ref);
  for (int k = 0; k + 1 < ref.nodes(); ++k) {
    ref.states[k + 1] = discretize_interval(*model, ref.states[k], ref.states[k + 1], ref.controls[k],
                                            ref.controls[k + 1], grid.tau(k), grid.tau(k + 1),
                                            times[k], sc.substeps)
                            .propagated;
  }
  return ref;
}

// With no objective pull, a linearly feasible reference is the exact
// minimizer: every penalty is zero there.
TEST(Subproblem, ConsistentReferenceIsFixedPoint) {
  const Scenario sc = hover_scene();
  Weights w = sc.weights;
  w.objective = 0.0;
  for (Method m : {Method::kCt, Method::kDt}) {
    const Trajectory ref = consistent_reference(sc, m);
    const Built b = build(sc, m, w, ref);
    const SubproblemSolution s = solve_subproblem(b.sp);
    ASSERT_TRUE(usable(s.status)) << s.detail;
    EXPECT_LT(trust_region_distance(s.trajectory, ref, b.sp.scaling), 1e-12) << to_string(m);
    EXPECT_LT(s.vc_l1, 1e-8) << to_string(m);
    EXPECT_EQ(s.vb_l1, 0.0) << to_string(m);
  }
}

// With the objective active the step away from the reference shrinks as
// λ_tr grows (quadratically in the distance measure).
TEST(Subproblem, DominantTrustRegionPinsIterate) {
  const Scenario sc = hover_scene();
  for (Method m : {Method::kCt, Method::kDt}) {
    const Trajectory ref = consistent_reference(sc, m);
    double dist[2];
    for (int i = 0; i < 2; ++i) {
      Weights w = sc.weights;
      w.trust_region = i == 0 ? 1e2 : 1e4;
      const Built b = build(sc, m, w, ref);
      const SubproblemSolution s = solve_subproblem(b.sp);
      ASSERT_TRUE(usable(s.status)) << s.detail;
      dist[i] = trust_region_distance(s.trajectory, ref, b.sp.scaling);
    }
    EXPECT_GT(dist[0], 0.0) << to_string(m);
    EXPECT_LT(dist[1], 1e-2 * dist[0]) << to_string(m);
  }
}

TEST(Subproblem, ZeroLicqStaysFeasibleThroughVirtualControl) {
  const Scenario sc = relative_nav_default();
  Weights w = sc.weights;
  w.licq = 0.0;
  const Trajectory ref = initial_reference(sc, Method::kCt);
  const auto model = make_model(sc, Method::kCt);
  const Discretization disc = discretize(*model, ref, sc.substeps);
  double max_y = 0.0;
  for (const auto& d : disc.intervals) max_y = std::max(max_y, d.propagated[kViolation]);
  ASSERT_GT(max_y, 0.0) << "reference must violate a path constraint";
  const Built b = build(sc, Method::kCt, w, ref);
  const SubproblemSolution s = solve_subproblem(b.sp);
  ASSERT_TRUE(usable(s.status)) << s.detail;
  EXPECT_GT(s.vc_l1, 0.0);
}

// Node 1 is pinned to its reference by a full terminal mask; the subject at
// p_S = (2, 0, 1) under a 45° ℓ2 cone gives g = 2 − 1 = 1, so the buffer can
// only take the value 1 and its epigraph adds exactly λ_vb to the objective.
TEST(Subproblem, PinnedBufferPaysVirtualBufferWeight) {
  Scenario sc = cinematography_default();
  sc.cone.mount = UnitQuaternion();
  sc.cone.norm = ConeNorm::kTwo;
  sc.cone.alpha = sc.cone.beta = M_PI / 4;
  sc.keypoints = {Keypoint::fixed(sc.initial_state.head<3>() + Vec3(2.0, 0.0, 1.0))};
  sc.range.reset();
  sc.final_state = sc.initial_state;
  sc.final_mask.fill(true);
  sc.set_nodes(2);
  const Trajectory ref = initial_reference(sc, Method::kDt);
  ASSERT_NEAR(los_residual_full(ref.states[1].head<kStateDim>(), 0.0, sc.keypoints[0], sc.cone).value, 1.0, 1e-12);

  double objective[2];
  for (int i = 0; i < 2; ++i) {
    Weights w = sc.weights;
    w.virtual_buffer = 100.0 * (i + 1);
    const Built b = build(sc, Method::kDt, w, ref);
    ASSERT_EQ(b.sp.layout.buffer_count, 1);
    const SubproblemSolution s = solve_subproblem(b.sp);
    ASSERT_TRUE(usable(s.status)) << s.detail;
    EXPECT_NEAR(s.buffers[0], 1.0, 1e-7);
    EXPECT_NEAR(s.vb_l1, 1.0, 1e-7);
    objective[i] = s.objective;
  }
  EXPECT_NEAR(objective[1] - objective[0], 100.0, 1e-5);
}

// The proximal term makes the objective strongly convex in the scaled
// trajectory with modulus 2λ_tr, so two solves whose objectives are within δ
// of optimal lie within 2·√(δ/λ_tr) of each other.
TEST(Subproblem, SolutionInvariantToVariableScaling) {
  ConicSettings tight;
  tight.tol_gap_abs = tight.tol_gap_rel = tight.tol_feas = 1e-10;
  for (const Scenario& sc : {cinematography_default(), relative_nav_default()}) {
    for (Method m : {Method::kCt, Method::kDt}) {
      const Trajectory ref = initial_reference(sc, m);
      SubproblemOptions raw;
      raw.use_scaled_variables = false;
      const SubproblemSolution a = solve_subproblem(build(sc, m, sc.weights, ref).sp, tight);
      const Built bb = build(sc, m, sc.weights, ref, raw);
      const SubproblemSolution b = solve_subproblem(bb.sp, tight);
      ASSERT_TRUE(usable(a.status) && usable(b.status)) << sc.name << " " << to_string(m);
      const double scale = std::max(1.0, std::abs(a.objective));
      EXPECT_NEAR(a.objective, b.objective, 1e-6 * scale) << sc.name << " " << to_string(m);
      const double bound = 2.0 * std::sqrt(1e-10 * scale / sc.weights.trust_region);
      EXPECT_LT(std::sqrt(trust_region_distance(a.trajectory, b.trajectory, bb.sp.scaling)), bound)
          << sc.name << " " << to_string(m);
    }
  }
}

TEST(Subproblem, FeasibleFromRandomizedReferences) {
  std::mt19937 rng(99);
  std::normal_distribution<double> n(0.0, 1.0);
  for (const Scenario& sc : {cinematography_default(), relative_nav_default()}) {
    for (Method m : {Method::kCt, Method::kDt}) {
      for (int trial = 0; trial < 3; ++trial) {
        Trajectory ref = initial_reference(sc, m);
        for (int k = 0; k < ref.nodes(); ++k) {
          for (int i = 0; i < 3; ++i) ref.states[k][i] += 4.0 * n(rng);
          ref.states[k].segment<4>(kQuaternion) += 0.5 * Vec4(n(rng), n(rng), n(rng), n(rng));
          ref.states[k].segment<4>(kQuaternion).normalize();
        }
        const SubproblemSolution s = solve_subproblem(build(sc, m, sc.weights, ref).sp);
        EXPECT_TRUE(usable(s.status)) << sc.name << " " << to_string(m) << " " << s.detail;
      }
    }
  }
}

TEST(Subproblem, RejectsMismatchedInputs) {
  const Scenario sc = cinematography_default();
  const Trajectory ref = initial_reference(sc, Method::kCt);
  const auto model = make_model(sc, Method::kCt);
  Discretization disc = discretize(*model, ref, 4);
  EXPECT_THROW(build_dt_subproblem(ref, disc, sc.weights, sc), InvalidInput);
  disc.intervals.pop_back();
  EXPECT_THROW(build_ct_subproblem(ref, disc, sc.weights, sc), InvalidInput);
}

TEST(Method, ParseAndPrint) {
  EXPECT_EQ(parse_method("ct"), Method::kCt);
  EXPECT_EQ(parse_method("DT"), Method::kDt);
  EXPECT_FALSE(parse_method("xt").has_value());
  EXPECT_STREQ(to_string(Method::kCt), "CT");
}

}  // namespace
}  // namespace losg
