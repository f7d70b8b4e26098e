#include <cmath>

#include <gtest/gtest.h>

#include "losg/conic.hpp"
#include "losg/errors.hpp"

namespace losg {
namespace {

AffineExpr var(int i, double coef = 1.0, double c = 0.0) {
  AffineExpr e(c);
  e.add(i, coef);
  return e;
}

TEST(ConicProgram, LeastSquaresToOne) {
  ConicProgram p;
  const int z = p.add_variables(1, "z");
  p.add_squared_cost(var(z, 1.0, -1.0), 1.0);
  const ConicSolution s = solve_conic(p);
  ASSERT_TRUE(usable(s.status)) << s.detail;
  EXPECT_NEAR(s.values[z], 1.0, 1e-7);
  EXPECT_NEAR(s.objective, 0.0, 1e-7);
}

TEST(ConicProgram, SecondOrderConeFeasibility) {
  ConicProgram p;
  const int x = p.add_variables(3, "xyc");
  p.add_equality(var(x, 1.0, -3.0), RowTag::kOther);
  p.add_equality(var(x + 1, 1.0, -4.0), RowTag::kOther);
  p.add_second_order_cone(var(x + 2), {var(x), var(x + 1)}, RowTag::kOther);
  p.add_linear_cost(x + 2, 1.0);
  const ConicSolution s = solve_conic(p);
  ASSERT_TRUE(usable(s.status)) << s.detail;
  EXPECT_NEAR(s.values[x + 2], 5.0, 1e-7);
  EXPECT_NEAR(s.objective, 5.0, 1e-7);
}

// minimize (x − 2)² + (y − 2)² + (x + y − 1)²  s.t.  0 ≤ x ≤ 1, 0 ≤ y ≤ 1/2.
// Stationarity at (1, 1/2): ∂f/∂x = −2 + 1 = −1, ∂f/∂y = −3 + 1 = −2, so both
// upper bounds are active with multipliers 1 and 2 (≥ 0): the KKT point.
// f = 1 + 2.25 + 0.25 = 3.5.
ConicProgram box_qp() {
  ConicProgram p;
  const int x = p.add_variables(2, "xy");
  p.add_squared_cost(var(x, 1.0, -2.0), 1.0);
  p.add_squared_cost(var(x + 1, 1.0, -2.0), 1.0);
  AffineExpr sum(-1.0);
  sum.add(x, 1.0).add(x + 1, 1.0);
  p.add_squared_cost(sum, 1.0);
  p.add_inequality(var(x, 1.0, -1.0), RowTag::kOther);
  p.add_inequality(var(x, -1.0), RowTag::kOther);
  p.add_inequality(var(x + 1, 1.0, -0.5), RowTag::kOther);
  p.add_inequality(var(x + 1, -1.0), RowTag::kOther);
  return p;
}

TEST(ConicProgram, BoxQpMatchesHandKkt) {
  const ConicSolution s = solve_conic(box_qp());
  ASSERT_TRUE(usable(s.status)) << s.detail;
  EXPECT_NEAR(s.values[0], 1.0, 1e-7);
  EXPECT_NEAR(s.values[1], 0.5, 1e-7);
  EXPECT_NEAR(s.objective, 3.5, 1e-7);
}

TEST(ConicProgram, VariableMapsDoNotMoveTheMinimizer) {
  ConicProgram p = box_qp();
  p.set_map(0, 0.5, 0.5);
  p.set_map(1, 0.25, 0.25);
  const ConicSolution s = solve_conic(p);
  ASSERT_TRUE(usable(s.status)) << s.detail;
  EXPECT_NEAR(s.values[0], 1.0, 1e-6);
  EXPECT_NEAR(s.values[1], 0.5, 1e-6);
  EXPECT_NEAR(s.objective, 3.5, 1e-6);
}

TEST(ConicProgram, LinearProgramWithConstant) {
  ConicProgram p;
  const int x = p.add_variables(2, "xy");
  p.add_linear_cost(x, 1.0);
  p.add_linear_cost(x + 1, 2.0);
  p.add_constant_cost(10.0);
  AffineExpr ge(1.0);  // 1 − x − y ≤ 0
  ge.add(x, -1.0).add(x + 1, -1.0);
  p.add_inequality(ge, RowTag::kOther);
  p.add_inequality(var(x, -1.0), RowTag::kOther);
  p.add_inequality(var(x + 1, -1.0), RowTag::kOther);
  const ConicSolution s = solve_conic(p);
  ASSERT_TRUE(usable(s.status)) << s.detail;
  EXPECT_NEAR(s.values[x], 1.0, 1e-7);
  EXPECT_NEAR(s.values[x + 1], 0.0, 1e-7);
  EXPECT_NEAR(s.objective, 11.0, 1e-7);
  EXPECT_NEAR(p.objective(s.values), s.objective, 1e-7);
}

TEST(ConicProgram, InfeasibleIsReportedNotThrown) {
  ConicProgram p;
  const int x = p.add_variables(1, "x");
  p.add_inequality(var(x, 1.0, 1.0), RowTag::kOther);   // x ≤ −1
  p.add_inequality(var(x, -1.0, 1.0), RowTag::kOther);  // x ≥ 1
  p.add_linear_cost(x, 1.0);
  ConicSolution s;
  EXPECT_NO_THROW(s = solve_conic(p));
  EXPECT_EQ(s.status, ConicStatus::kInfeasible);
  EXPECT_FALSE(usable(s.status));
}

TEST(ConicProgram, RowAuditAndEvaluation) {
  ConicProgram p;
  const int x = p.add_variables(3, "x");
  EXPECT_EQ(p.num_variables(), 3);
  p.add_equality(var(x), RowTag::kDynamics);
  p.add_equality(var(x + 1), RowTag::kDynamics);
  p.add_inequality(var(x + 2, 1.0, -1.0), RowTag::kGate);
  p.add_second_order_cone(var(x + 2), {var(x), var(x + 1)}, RowTag::kRangeCone);
  EXPECT_EQ(p.rows(RowTag::kDynamics), 2);
  EXPECT_EQ(p.rows(RowTag::kGate), 1);
  EXPECT_EQ(p.rows(RowTag::kRangeCone), 3);
  EXPECT_EQ(p.rows(RowTag::kLicq), 0);
  EXPECT_EQ(p.equality_rows(), 2);
  EXPECT_EQ(p.inequality_rows(), 1);
  EXPECT_EQ(p.cone_count(), 1);

  Eigen::VectorXd v(3);
  v << 0.0, 0.0, 0.5;
  EXPECT_EQ(p.max_violation(v), 0.0);
  v << 3.0, 4.0, 2.0;  // equality off by 4, x₂ − 1 = 1, ‖(3, 4)‖ − 2 = 3
  EXPECT_NEAR(p.max_violation(v), 4.0, 1e-15);

  p.add_squared_cost(var(x, 2.0, 1.0), 0.5);
  p.add_linear_cost(x + 1, -1.0);
  EXPECT_NEAR(p.objective(v), 0.5 * 49.0 - 4.0, 1e-12);
}

TEST(ConicProgram, RejectsUnknownVariable) {
  ConicProgram p;
  p.add_variables(2, "x");
  EXPECT_THROW(p.add_equality(var(5), RowTag::kOther), InvalidInput);
  EXPECT_THROW(p.set_map(0, 0.0, 1.0), InvalidInput);
}

TEST(AffineExpr, SkipsZeroCoefficients) {
  AffineExpr e(2.0);
  e.add(0, 0.0).add(1, 3.0);
  ASSERT_EQ(e.terms.size(), 1u);
  Eigen::VectorXd v(2);
  v << 100.0, 2.0;
  EXPECT_EQ(e.evaluate(v), 8.0);
}

}  // namespace
}  // namespace losg
