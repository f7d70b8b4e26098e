#include "losg/conic.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>

#include "clarabel_c.h"
#include "losg/errors.hpp"

namespace losg {

const char* to_string(RowTag tag) {
  switch (tag) {
    case RowTag::kDynamics: return "dynamics";
    case RowTag::kLicq: return "licq";
    case RowTag::kInitial: return "initial";
    case RowTag::kTerminal: return "terminal";
    case RowTag::kControlBox: return "control_box";
    case RowTag::kStateBox: return "state_box";
    case RowTag::kGate: return "gate";
    case RowTag::kLosBuffer: return "los_buffer";
    case RowTag::kRangeBuffer: return "range_buffer";
    case RowTag::kBufferEpigraph: return "buffer_epigraph";
    case RowTag::kVirtualControl: return "virtual_control";
    case RowTag::kRangeCone: return "range_cone";
    case RowTag::kFuelCone: return "fuel_cone";
    case RowTag::kOther: return "other";
    case RowTag::kCount: break;
  }
  return "?";
}

const char* to_string(ConicStatus s) {
  switch (s) {
    case ConicStatus::kOptimal: return "optimal";
    case ConicStatus::kNearOptimal: return "near-optimal";
    case ConicStatus::kInfeasible: return "infeasible";
    case ConicStatus::kNumericalFailure: return "numerical-failure";
  }
  return "?";
}

double AffineExpr::evaluate(const Eigen::VectorXd& v) const {
  double s = constant;
  for (const LinearTerm& t : terms) s += t.coef * v[t.var];
  return s;
}

int ConicProgram::add_variables(int count, const std::string& block) {
  if (count < 0) throw InvalidInput("add_variables: negative count");
  const int first = num_variables();
  scale_.resize(first + count, 1.0);
  offset_.resize(first + count, 0.0);
  blocks_.resize(first + count, block);
  linear_.conservativeResize(first + count);
  linear_.tail(count).setZero();
  return first;
}

void ConicProgram::set_map(int var, double scale, double offset) {
  if (var < 0 || var >= num_variables()) throw InvalidInput("set_map: variable out of range");
  if (!(scale != 0.0) || !std::isfinite(scale) || !std::isfinite(offset)) {
    throw InvalidInput("set_map: scale must be finite and nonzero");
  }
  scale_[var] = scale;
  offset_[var] = offset;
}

void ConicProgram::check(const AffineExpr& e) const {
  for (const LinearTerm& t : e.terms) {
    if (t.var < 0 || t.var >= num_variables()) {
      throw InvalidInput("ConicProgram: term references unknown variable " + std::to_string(t.var));
    }
    if (!std::isfinite(t.coef)) throw InvalidInput("ConicProgram: non-finite coefficient");
  }
  if (!std::isfinite(e.constant)) throw InvalidInput("ConicProgram: non-finite constant");
}

void ConicProgram::add_linear_cost(int var, double coef) {
  if (var < 0 || var >= num_variables()) throw InvalidInput("add_linear_cost: bad variable");
  linear_[var] += coef;
}

void ConicProgram::add_squared_cost(const AffineExpr& e, double weight) {
  check(e);
  if (!(weight >= 0.0)) throw InvalidInput("add_squared_cost: weight must be nonnegative");
  if (weight > 0.0) squared_.push_back({e, weight});
}

void ConicProgram::add_equality(const AffineExpr& e, RowTag tag) {
  check(e);
  equalities_.push_back(e);
  ++tag_rows_[static_cast<int>(tag)];
}

void ConicProgram::add_inequality(const AffineExpr& e, RowTag tag) {
  check(e);
  inequalities_.push_back(e);
  ++tag_rows_[static_cast<int>(tag)];
}

void ConicProgram::add_second_order_cone(const AffineExpr& bound,
                                         const std::vector<AffineExpr>& elements, RowTag tag) {
  check(bound);
  for (const AffineExpr& e : elements) check(e);
  cones_.push_back({bound, elements});
  tag_rows_[static_cast<int>(tag)] += 1 + static_cast<int>(elements.size());
}

double ConicProgram::objective(const Eigen::VectorXd& v) const {
  double f = constant_ + linear_.dot(v);
  for (const Squared& s : squared_) {
    const double e = s.expr.evaluate(v);
    f += s.weight * e * e;
  }
  return f;
}

double ConicProgram::max_violation(const Eigen::VectorXd& v) const {
  double worst = 0.0;
  for (const AffineExpr& e : equalities_) worst = std::max(worst, std::abs(e.evaluate(v)));
  for (const AffineExpr& e : inequalities_) worst = std::max(worst, e.evaluate(v));
  for (const Cone& c : cones_) {
    double n2 = 0.0;
    for (const AffineExpr& e : c.elements) n2 += std::pow(e.evaluate(v), 2);
    worst = std::max(worst, std::sqrt(n2) - c.bound.evaluate(v));
  }
  return worst;
}

namespace {

using Triplet = Eigen::Triplet<double>;
using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor>;

// Affine expression in solver coordinates: ã·z + c̃.
struct Lowered {
  std::vector<LinearTerm> terms;
  double constant;
};

Lowered lower(const AffineExpr& e, const ConicProgram& p) {
  Lowered l{{}, e.constant};
  l.terms.reserve(e.terms.size());
  for (const LinearTerm& t : e.terms) {
    l.terms.push_back({t.var, t.coef * p.scale(t.var)});
    l.constant += t.coef * p.offset(t.var);
  }
  return l;
}

struct Csc {
  std::vector<std::size_t> colptr;
  std::vector<std::size_t> rowval;
  std::vector<double> nzval;
};

Csc to_csc(SpMat& m) {
  m.makeCompressed();
  Csc c;
  const int n = static_cast<int>(m.cols());
  c.colptr.assign(m.outerIndexPtr(), m.outerIndexPtr() + n + 1);
  const std::size_t nnz = m.nonZeros();
  c.rowval.assign(m.innerIndexPtr(), m.innerIndexPtr() + nnz);
  c.nzval.assign(m.valuePtr(), m.valuePtr() + nnz);
  return c;
}

ConicStatus map_status(int code) {
  switch (code) {
    case 1: return ConicStatus::kOptimal;
    case 4: return ConicStatus::kNearOptimal;
    case 2:
    case 3:
    case 5:
    case 6: return ConicStatus::kInfeasible;
    default: return ConicStatus::kNumericalFailure;
  }
}

const char* backend_status(int code) {
  static const char* names[] = {"unsolved",
                                "solved",
                                "primal_infeasible",
                                "dual_infeasible",
                                "almost_solved",
                                "almost_primal_infeasible",
                                "almost_dual_infeasible",
                                "max_iterations",
                                "max_time",
                                "numerical_error",
                                "insufficient_progress",
                                "callback_terminated"};
  if (code >= 0 && code <= 11) return names[code];
  return code == -2 ? "panic" : "setup_error";
}

}  // namespace

ConicSolution solve_conic(const ConicProgram& p, const ConicSettings& settings) {
  const int n = p.num_variables();

  // Objective.
  std::vector<Triplet> pt;
  Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) q[i] = p.linear_cost()[i] * p.scale(i);
  for (const ConicProgram::Squared& s : p.squared_costs()) {
    const Lowered l = lower(s.expr, p);
    for (const LinearTerm& a : l.terms) {
      q[a.var] += 2.0 * s.weight * l.constant * a.coef;
      for (const LinearTerm& b : l.terms) {
        if (a.var <= b.var) pt.emplace_back(a.var, b.var, 2.0 * s.weight * a.coef * b.coef);
      }
    }
  }
  // Upper triangle of 2w·ããᵀ; repeated variables accumulate in setFromTriplets.
  SpMat P(n, n);
  P.setFromTriplets(pt.begin(), pt.end());

  // Constraints: zero cone, nonnegative cone, then second-order cones.
  std::vector<Triplet> at;
  std::vector<double> b;
  int row = 0;
  auto push_row = [&](const Lowered& l, double sign) {
    // sign = +1: row a·z (s = b − a·z); sign = −1: row −a·z.
    for (const LinearTerm& t : l.terms) at.emplace_back(row, t.var, sign * t.coef);
    b.push_back(-sign * l.constant);
    ++row;
  };
  for (const AffineExpr& e : p.equalities()) push_row(lower(e, p), 1.0);
  for (const AffineExpr& e : p.inequalities()) push_row(lower(e, p), 1.0);
  std::vector<std::size_t> soc_dims;
  for (const ConicProgram::Cone& c : p.cones()) {
    push_row(lower(c.bound, p), -1.0);
    for (const AffineExpr& e : c.elements) push_row(lower(e, p), -1.0);
    soc_dims.push_back(1 + c.elements.size());
  }
  const int m = row;
  SpMat A(m, n);
  A.setFromTriplets(at.begin(), at.end());

  Csc pc = to_csc(P);
  Csc ac = to_csc(A);

  ClarabelCSettings cs{};
  cs.max_iter = static_cast<std::uint32_t>(settings.max_iterations);
  cs.time_limit = settings.time_limit;
  cs.tol_gap_abs = settings.tol_gap_abs;
  cs.tol_gap_rel = settings.tol_gap_rel;
  cs.tol_feas = settings.tol_feas;
  cs.verbose = settings.verbose ? 1 : 0;

  std::vector<double> x(n, 0.0), z(m, 0.0), s(m, 0.0);
  ClarabelCResult res{};
  const int rc = clarabel_c_solve(
      static_cast<std::size_t>(n), static_cast<std::size_t>(m), pc.colptr.data(),
      pc.rowval.data(), pc.nzval.data(), q.data(), ac.colptr.data(), ac.rowval.data(),
      ac.nzval.data(), b.data(), static_cast<std::size_t>(p.equality_rows()),
      static_cast<std::size_t>(p.inequality_rows()), soc_dims.size(), soc_dims.data(), &cs,
      x.data(), z.data(), s.data(), &res);

  ConicSolution out;
  out.iterations = static_cast<int>(res.iterations);
  out.solve_time = res.solve_time;
  out.detail = backend_status(rc == 0 ? res.status : rc);
  out.status = rc == 0 ? map_status(res.status) : ConicStatus::kNumericalFailure;
  out.values.resize(n);
  for (int i = 0; i < n; ++i) out.values[i] = p.scale(i) * x[i] + p.offset(i);
  if (!out.values.allFinite()) {
    out.status = ConicStatus::kNumericalFailure;
    out.objective = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.objective = p.objective(out.values);
  }
  return out;
}

}  // namespace losg
