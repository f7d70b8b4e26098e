#include "losg/discretizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "losg/errors.hpp"

namespace losg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

TimeGrid::TimeGrid(int nodes) : nodes_(nodes) {
  if (nodes < 2) throw InvalidInput("TimeGrid: need at least 2 nodes");
}

double TimeGrid::tau(int k) const {
  if (k == nodes_ - 1) return 1.0;
  return static_cast<double>(k) * step();
}

int TimeGrid::interval_of(double tau) const {
  const int k = static_cast<int>(std::floor(tau / step()));
  return std::clamp(k, 0, nodes_ - 2);
}

std::vector<double> node_times(const std::vector<VectorXd>& controls, int dilation_index,
                               double t0) {
  const int n = static_cast<int>(controls.size());
  std::vector<double> t(n, t0);
  if (n < 2) return t;
  const double h = 1.0 / static_cast<double>(n - 1);
  for (int k = 1; k < n; ++k) {
    const double ds = dilation_index < 0
                          ? 1.0
                          : 0.5 * (controls[k - 1][dilation_index] + controls[k][dilation_index]);
    t[k] = t[k - 1] + ds * h;
  }
  return t;
}

VectorXd foh_interp(const VectorXd& u_k, const VectorXd& u_k1, double tau, double tau_k,
                    double tau_k1) {
  constexpr double eps = 1e-12;
  if (!(tau_k1 > tau_k)) throw InvalidInput("foh_interp: empty interval");
  if (tau < tau_k - eps || tau > tau_k1 + eps) {
    throw InvalidInput("foh_interp: tau outside [tau_k, tau_k+1]");
  }
  const double sp = std::clamp((tau - tau_k) / (tau_k1 - tau_k), 0.0, 1.0);
  return (1.0 - sp) * u_k + sp * u_k1;
}

double Discretization::max_defect() const {
  double m = 0.0;
  for (const auto& iv : intervals) m = std::max(m, iv.defect.cwiseAbs().maxCoeff());
  return m;
}

namespace {

// Joint state of the discretization ODE.
struct Joint {
  VectorXd x;
  MatrixXd phi;
  MatrixXd pm;
  MatrixXd pp;
  double t = 0.0;
};

struct JointRate {
  VectorXd x;
  MatrixXd phi;
  MatrixXd pm;
  MatrixXd pp;
  double t = 0.0;
};

Joint advance(const Joint& j, const JointRate& r, double h) {
  return Joint{j.x + h * r.x, j.phi + h * r.phi, j.pm + h * r.pm, j.pp + h * r.pp, j.t + h * r.t};
}

class IntervalOde {
 public:
  IntervalOde(const DynamicsModel& model, const VectorXd& u_k, const VectorXd& u_k1,
              double tau_k, double tau_k1)
      : model_(model), u_k_(u_k), u_k1_(u_k1), tau_k_(tau_k), tau_k1_(tau_k1) {}

  JointRate operator()(double tau, const Joint& j) const {
    const double sp = (tau - tau_k_) / (tau_k1_ - tau_k_);
    const double sm = 1.0 - sp;
    const VectorXd u = sm * u_k_ + sp * u_k1_;
    VectorXd f;
    MatrixXd A, B;
    model_.evaluate(j.t, j.x, u, &f, &A, &B);
    JointRate r;
    r.x = std::move(f);
    r.phi.noalias() = A * j.phi;
    r.pm.noalias() = A * j.pm;
    r.pm += sm * B;
    r.pp.noalias() = A * j.pp;
    r.pp += sp * B;
    const int si = model_.dilation_index();
    r.t = si < 0 ? 1.0 : u[si];
    return r;
  }

 private:
  const DynamicsModel& model_;
  const VectorXd& u_k_;
  const VectorXd& u_k1_;
  double tau_k_;
  double tau_k1_;
};

}  // namespace

IntervalDiscretization discretize_interval(const DynamicsModel& model, const VectorXd& x_k,
                                           const VectorXd& x_next_ref, const VectorXd& u_k,
                                           const VectorXd& u_k1, double tau_k, double tau_k1,
                                           double t_k, int substeps, int index) {
  const int n = model.state_dim();
  const int m = model.control_dim();
  if (x_k.size() != n || x_next_ref.size() != n || u_k.size() != m || u_k1.size() != m) {
    throw InvalidInput("discretize_interval: dimension mismatch");
  }
  if (substeps < 1) throw InvalidInput("discretize_interval: substeps must be >= 1");
  const int si = model.dilation_index();
  if (si >= 0 && !(u_k[si] > 0.0 && u_k1[si] > 0.0)) {
    throw InvalidInput("discretize_interval: dilation must be positive");
  }

  Joint j{x_k, MatrixXd::Identity(n, n), MatrixXd::Zero(n, m), MatrixXd::Zero(n, m), t_k};
  const double len = tau_k1 - tau_k;
  if (len > 0.0) {
    const IntervalOde ode(model, u_k, u_k1, tau_k, tau_k1);
    const double h = len / substeps;
    for (int i = 0; i < substeps; ++i) {
      const double tau = tau_k + i * h;
      const JointRate k1 = ode(tau, j);
      const JointRate k2 = ode(tau + 0.5 * h, advance(j, k1, 0.5 * h));
      const JointRate k3 = ode(tau + 0.5 * h, advance(j, k2, 0.5 * h));
      const JointRate k4 = ode(tau + h, advance(j, k3, h));
      j.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
      j.phi += h / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi);
      j.pm += h / 6.0 * (k1.pm + 2.0 * k2.pm + 2.0 * k3.pm + k4.pm);
      j.pp += h / 6.0 * (k1.pp + 2.0 * k2.pp + 2.0 * k3.pp + k4.pp);
      j.t += h / 6.0 * (k1.t + 2.0 * k2.t + 2.0 * k3.t + k4.t);
      if (!j.x.allFinite() || !j.phi.allFinite() || !j.pm.allFinite() || !j.pp.allFinite()) {
        throw NumericalFailure("non-finite value while discretizing interval", index);
      }
    }
  }

  IntervalDiscretization out;
  out.A = std::move(j.phi);
  out.B_minus = std::move(j.pm);
  out.B_plus = std::move(j.pp);
  out.propagated = j.x;
  out.defect = j.x - x_next_ref;
  return out;
}

Discretization discretize(const DynamicsModel& model, const Trajectory& ref, int substeps,
                          double t0) {
  const int n = ref.nodes();
  if (n < 2 || static_cast<int>(ref.controls.size()) != n) {
    throw InvalidInput("discretize: trajectory needs >= 2 nodes with matching controls");
  }
  const TimeGrid grid(n);
  const std::vector<double> times = node_times(ref.controls, model.dilation_index(), t0);
  Discretization d;
  d.intervals.resize(n - 1);
  for (int k = 0; k < n - 1; ++k) {
    d.intervals[k] =
        discretize_interval(model, ref.states[k], ref.states[k + 1], ref.controls[k],
                            ref.controls[k + 1], grid.tau(k), grid.tau(k + 1), times[k], substeps, k);
  }
  return d;
}

namespace {

class FohProfile {
 public:
  FohProfile(const std::vector<VectorXd>& controls) : controls_(controls), grid_(controls.size()) {}

  VectorXd at(double tau, int k) const {
    return foh_interp(controls_[k], controls_[k + 1], tau, grid_.tau(k), grid_.tau(k + 1));
  }
  const TimeGrid& grid() const { return grid_; }

 private:
  const std::vector<VectorXd>& controls_;
  TimeGrid grid_;
};

void renormalize(const DynamicsModel& model, VectorXd& x) {
  const int qi = model.quaternion_index();
  if (qi < 0) return;
  const double n = x.segment<4>(qi).norm();
  if (n > 0.0) x.segment<4>(qi) /= n;
}

// One RK4 step of (x, t) over [a, b] inside interval k.
void rk4_step(const DynamicsModel& model, const FohProfile& foh, int k, double a, double b,
              VectorXd& x, double& t) {
  const double h = b - a;
  const int si = model.dilation_index();
  auto rate = [&](double tau, const VectorXd& xs, double ts, double& dt) {
    const VectorXd u = foh.at(tau, k);
    dt = si < 0 ? 1.0 : u[si];
    return model.derivative(ts, xs, u);
  };
  double d1, d2, d3, d4;
  const VectorXd k1 = rate(a, x, t, d1);
  const VectorXd k2 = rate(a + 0.5 * h, x + 0.5 * h * k1, t + 0.5 * h * d1, d2);
  const VectorXd k3 = rate(a + 0.5 * h, x + 0.5 * h * k2, t + 0.5 * h * d2, d3);
  const VectorXd k4 = rate(b, x + h * k3, t + h * d3, d4);
  x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  t += h / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
}

}  // namespace

DenseTrajectory propagate_nonlinear(const DynamicsModel& model, const VectorXd& x0,
                                    const std::vector<VectorXd>& controls, int samples, double t0) {
  if (controls.size() < 2) throw InvalidInput("propagate_nonlinear: need >= 2 control nodes");
  if (samples < 2) throw InvalidInput("propagate_nonlinear: need >= 2 samples");
  if (x0.size() != model.state_dim()) throw InvalidInput("propagate_nonlinear: state size");
  for (const VectorXd& u : controls) {
    if (u.size() != model.control_dim()) throw InvalidInput("propagate_nonlinear: control size");
  }
  const FohProfile foh(controls);
  const TimeGrid& grid = foh.grid();

  DenseTrajectory out;
  out.tau.reserve(samples);
  out.time.reserve(samples);
  out.states.reserve(samples);
  out.controls.reserve(samples);

  VectorXd x = x0;
  double t = t0;
  double tau = 0.0;
  auto emit = [&](double at) {
    out.tau.push_back(at);
    out.time.push_back(t);
    out.states.push_back(x);
    out.controls.push_back(foh.at(at, grid.interval_of(at)));
  };
  emit(0.0);

  for (int i = 1; i < samples; ++i) {
    const double target = i == samples - 1 ? 1.0 : static_cast<double>(i) / (samples - 1);
    // Split the step at node boundaries so each RK4 step sees a linear control.
    while (tau < target) {
      int k = grid.interval_of(tau);
      while (k < grid.intervals() - 1 && grid.tau(k + 1) <= tau) ++k;
      const double end = std::min(target, grid.tau(k + 1));
      rk4_step(model, foh, k, tau, end, x, t);
      renormalize(model, x);
      tau = end;
      if (!x.allFinite()) throw NumericalFailure("non-finite state during propagation", i);
    }
    tau = target;
    emit(target);
  }
  return out;
}

std::vector<VectorXd> interval_defects(const DynamicsModel& model, const Trajectory& traj,
                                       int substeps, double t0) {
  const int n = traj.nodes();
  const TimeGrid grid(n);
  const std::vector<double> times = node_times(traj.controls, model.dilation_index(), t0);
  const FohProfile foh(traj.controls);
  std::vector<VectorXd> defects;
  defects.reserve(n - 1);
  for (int k = 0; k < n - 1; ++k) {
    VectorXd x = traj.states[k];
    double t = times[k];
    const double h = grid.step() / substeps;
    for (int i = 0; i < substeps; ++i) {
      const double a = grid.tau(k) + i * h;
      const double b = i == substeps - 1 ? grid.tau(k + 1) : a + h;
      rk4_step(model, foh, k, a, b, x, t);
    }
    if (!x.allFinite()) throw NumericalFailure("non-finite state during propagation", k);
    defects.push_back(x - traj.states[k + 1]);
  }
  return defects;
}

}  // namespace losg
