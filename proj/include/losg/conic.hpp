#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace losg {

/// Category of a constraint row, used for auditing program structure.
enum class RowTag : int {
  kDynamics,
  kLicq,
  kInitial,
  kTerminal,
  kControlBox,
  kStateBox,
  kGate,
  kLosBuffer,
  kRangeBuffer,
  kBufferEpigraph,
  kVirtualControl,
  kRangeCone,
  kFuelCone,
  kOther,
  kCount
};

const char* to_string(RowTag tag);

struct LinearTerm {
  int var;
  double coef;
};

/// Σ coef·v_var + constant over the program's physical variables.
struct AffineExpr {
  std::vector<LinearTerm> terms;
  double constant = 0.0;

  AffineExpr() = default;
  explicit AffineExpr(double c) : constant(c) {}
  AffineExpr& add(int var, double coef) {
    if (coef != 0.0) terms.push_back({var, coef});
    return *this;
  }
  double evaluate(const Eigen::VectorXd& v) const;
};

/// Convex program over "physical" variables v, each bound to a solver
/// variable z by v = scale·z + offset:
///
///   minimize   Σ w_j (e_j(v))² + cᵀv + c₀
///   subject to e(v) = 0,  e(v) ≤ 0,  ‖(e_1(v), …, e_k(v))‖₂ ≤ e_0(v)
///
/// The map only changes coordinates, never the set of minimizers.
class ConicProgram {
 public:
  /// Appends `count` variables with identity maps; returns the first index.
  int add_variables(int count, const std::string& block);
  void set_map(int var, double scale, double offset);

  int num_variables() const { return static_cast<int>(scale_.size()); }
  double scale(int var) const { return scale_[var]; }
  double offset(int var) const { return offset_[var]; }

  void add_linear_cost(int var, double coef);
  void add_constant_cost(double c) { constant_ += c; }
  /// weight · e(v)²
  void add_squared_cost(const AffineExpr& e, double weight);

  void add_equality(const AffineExpr& e, RowTag tag);
  void add_inequality(const AffineExpr& e, RowTag tag);
  void add_second_order_cone(const AffineExpr& bound, const std::vector<AffineExpr>& elements,
                             RowTag tag);

  int equality_rows() const { return static_cast<int>(equalities_.size()); }
  int inequality_rows() const { return static_cast<int>(inequalities_.size()); }
  int cone_count() const { return static_cast<int>(cones_.size()); }
  /// Scalar rows with the tag; a cone of dimension d counts d rows.
  int rows(RowTag tag) const { return tag_rows_[static_cast<int>(tag)]; }

  /// Objective at physical point v.
  double objective(const Eigen::VectorXd& v) const;
  /// Largest violation of any constraint at v (0 when feasible).
  double max_violation(const Eigen::VectorXd& v) const;

  /// Solver-coordinate starting point; carried for solvers that accept one.
  std::optional<Eigen::VectorXd> warm_start;

  struct Cone {
    AffineExpr bound;
    std::vector<AffineExpr> elements;
  };
  struct Squared {
    AffineExpr expr;
    double weight;
  };

  const std::vector<AffineExpr>& equalities() const { return equalities_; }
  const std::vector<AffineExpr>& inequalities() const { return inequalities_; }
  const std::vector<Cone>& cones() const { return cones_; }
  const std::vector<Squared>& squared_costs() const { return squared_; }
  const Eigen::VectorXd& linear_cost() const { return linear_; }
  double constant_cost() const { return constant_; }
  const std::vector<std::string>& block_names() const { return blocks_; }

 private:
  void check(const AffineExpr& e) const;

  std::vector<double> scale_;
  std::vector<double> offset_;
  std::vector<std::string> blocks_;
  Eigen::VectorXd linear_;
  double constant_ = 0.0;
  std::vector<Squared> squared_;
  std::vector<AffineExpr> equalities_;
  std::vector<AffineExpr> inequalities_;
  std::vector<Cone> cones_;
  std::array<int, static_cast<int>(RowTag::kCount)> tag_rows_{};
};

enum class ConicStatus { kOptimal, kNearOptimal, kInfeasible, kNumericalFailure };

const char* to_string(ConicStatus s);
inline bool usable(ConicStatus s) {
  return s == ConicStatus::kOptimal || s == ConicStatus::kNearOptimal;
}

struct ConicSettings {
  int max_iterations = 200;
  double tol_gap_abs = 1e-8;
  double tol_gap_rel = 1e-8;
  double tol_feas = 1e-8;
  double time_limit = std::numeric_limits<double>::infinity();
  bool verbose = false;
};

struct ConicSolution {
  ConicStatus status = ConicStatus::kNumericalFailure;
  Eigen::VectorXd values;  // physical variables
  double objective = 0.0;  // including the constant term
  int iterations = 0;
  double solve_time = 0.0;
  std::string detail;  // backend status name
};

/// Lowers the program to solver coordinates and runs the interior-point
/// backend. Failures are reported through the status, never thrown.
ConicSolution solve_conic(const ConicProgram& program, const ConicSettings& settings = {});

}  // namespace losg
