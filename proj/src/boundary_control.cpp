#include "bclab/boundary_control.hpp"

#include <Eigen/LU>
#include <cmath>
#include <numbers>

namespace bclab {

namespace {

const Complex kI(0.0, 1.0);

void check_signal(const ControlSignal& f) {
  if (!(f.t_end > f.t_start)) {
    throw InvalidArgument("control signal needs t_end > t_start");
  }
}

double resolve_dt(const Grid& grid, double dt) {
  if (dt < 0.0) throw InvalidArgument("time step must be nonnegative");
  return dt == 0.0 ? 0.5 * grid.h : dt;
}

/// Exact subinterval integrals E0 = int_0^d e^{-i lam s} ds and
/// E1 = int_0^d s e^{-i lam s} ds, stable for small lam * d.
void filon_weights(double lam, double d, Complex& e0, Complex& e1) {
  const double z = lam * d;
  if (std::abs(z) < 1e-5) {
    e0 = d * (1.0 - kI * (z / 2.0) - z * z / 6.0 + kI * (z * z * z / 24.0));
    e1 = d * d *
         (0.5 - kI * (z / 3.0) - z * z / 8.0 + kI * (z * z * z / 30.0));
    return;
  }
  const Complex ilam = kI * lam;
  const Complex ez = std::exp(-kI * z);
  e0 = (1.0 - ez) / ilam;
  e1 = d * ez / (-ilam) + e0 / ilam;
}

}  // namespace

double ControlSignal::value(double t) const {
  check_signal(*this);
  if (t <= t_start || t >= t_end) return 0.0;
  const double w = t_end - t_start;
  const double s = std::sin(std::numbers::pi * (t - t_start) / w);
  const double s2 = s * s;
  return amplitude * (shape == BumpShape::sin2 ? s2 : s2 * s2);
}

double ControlSignal::derivative(double t) const {
  check_signal(*this);
  if (t <= t_start || t >= t_end) return 0.0;
  const double w = t_end - t_start;
  const double a = std::numbers::pi * (t - t_start) / w;
  const double s = std::sin(a);
  const double c = std::cos(a);
  const double rate = std::numbers::pi / w;
  if (shape == BumpShape::sin2) return amplitude * 2.0 * s * c * rate;
  return amplitude * 4.0 * s * s * s * c * rate;
}

Vec ControlSignal::sample(const RealVec& times) const {
  Vec out(times.size());
  for (Eigen::Index j = 0; j < times.size(); ++j) out(j) = value(times(j));
  return out;
}

double ControlSignal::l2_norm(double t0, double t1) const {
  check_signal(*this);
  const double a = std::max(t0, t_start);
  const double b = std::min(t1, t_end);
  if (b <= a) return 0.0;
  const int m = 4096;
  const double dt = (b - a) / m;
  Vec sq(m + 1);
  for (int j = 0; j <= m; ++j) {
    const double v = value(a + j * dt);
    sq(j) = v * v;
  }
  const Complex integral = integrate_time(sq, dt, Quadrature::simpson);
  return std::sqrt(std::max(0.0, integral.real()));
}

Vec transport_oracle(const Grid& grid, const ControlSignal& f, double t) {
  check_signal(f);
  if (t > grid.length + 1e-12) {
    throw InvalidArgument(
        "transport_oracle: valid only while the front is inside the domain "
        "(t <= length)");
  }
  Vec u(2 * grid.n);
  for (int j = 0; j < grid.n; ++j) {
    const double v = f.value(t - grid.nodes(j));
    u(2 * j) = v;
    u(2 * j + 1) = kI * v;
  }
  return u;
}

Vec transport_oracle_backward(const Grid& grid, const ControlSignal& f,
                              double t) {
  check_signal(f);
  if (t > 0.0 || -t > grid.length + 1e-12) {
    throw InvalidArgument(
        "transport_oracle_backward: needs -length <= t <= 0");
  }
  // Negative-time mirror: the port sees f(-t), so the profile at time t is
  // f(-t - x) carried by the opposite polarization.
  Vec u(2 * grid.n);
  for (int j = 0; j < grid.n; ++j) {
    const double v = f.value(-t - grid.nodes(j));
    u(2 * j) = v;
    u(2 * j + 1) = -kI * v;
  }
  return u;
}

Vec wrong_polarization_forward(const Vec& u, const Grid& grid) {
  Vec c(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    c(j) = 0.5 * (u(2 * j) + kI * u(2 * j + 1));
  }
  return c;
}

Vec wrong_polarization_backward(const Vec& u, const Grid& grid) {
  Vec c(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    c(j) = 0.5 * (u(2 * j) - kI * u(2 * j + 1));
  }
  return c;
}

double tail_mass(const Vec& u, const Grid& grid, double cutoff) {
  double acc = 0.0;
  for (int j = 0; j < grid.n; ++j) {
    if (grid.nodes(j) > cutoff) {
      acc += grid.weights(j) *
             (std::norm(u(2 * j)) + std::norm(u(2 * j + 1)));
    }
  }
  return std::sqrt(acc);
}

namespace {

struct CrankNicolson {
  Eigen::PartialPivLU<Mat> left;
  Mat right;
  int c0, c1;

  CrankNicolson(const DiscreteGreenSystem& sys, double dt_signed)
      : c0(sys.port0_index()), c1(sys.port1_index()) {
    const int dim = sys.state_dim();
    Mat ml = Mat::Identity(dim, dim) - kI * (0.5 * dt_signed) * sys.op;
    right = Mat::Identity(dim, dim) + kI * (0.5 * dt_signed) * sys.op;
    ml.row(c0).setZero();
    ml(c0, c0) = 1.0;
    ml.row(c1).setZero();
    ml(c1, c1) = 1.0;
    left.compute(ml);
  }

  Vec step(const Vec& u, Complex port0_value) const {
    Vec rhs = right * u;
    rhs(c0) = port0_value;
    rhs(c1) = 0.0;
    return left.solve(rhs);
  }
};

Trajectory integrate_controlled(const DiscreteGreenSystem& sys,
                                const ControlSignal& f, double t_final,
                                double dt, bool backward) {
  check_signal(f);
  if (f.t_start < -1e-12) {
    throw InvalidArgument(
        "boundary control must start at t >= 0 so the system starts at rest");
  }
  const double span = std::abs(t_final);
  if (!(span > 0.0)) {
    throw InvalidArgument("solve needs a nonzero final time");
  }
  const double dt0 = resolve_dt(sys.grid, dt);
  const int steps = std::max(1, static_cast<int>(std::lround(span / dt0)));
  const double step_signed = t_final / steps;

  Trajectory traj;
  traj.times = RealVec::LinSpaced(steps + 1, 0.0, t_final);
  traj.states.resize(sys.state_dim(), steps + 1);
  traj.states.col(0).setZero();
  if (span > sys.grid.length + 1e-12) {
    traj.warnings.push_back(
        "evolution horizon exceeds the domain length; the controlled front "
        "reaches the far boundary and the transport picture breaks");
  }

  const CrankNicolson cn(sys, step_signed);
  Vec u = Vec::Zero(sys.state_dim());
  for (int s = 1; s <= steps; ++s) {
    const double t_next = traj.times(s);
    const double drive = backward ? f.value(-t_next) : f.value(t_next);
    u = cn.step(u, drive);
    traj.states.col(s) = u;
  }
  return traj;
}

}  // namespace

Trajectory solve_bc_direct(const DiscreteGreenSystem& sys,
                           const ControlSignal& f, double t_final,
                           double dt) {
  if (!(t_final > 0.0)) {
    throw InvalidArgument("solve_bc_direct: t_final must be positive");
  }
  return integrate_controlled(sys, f, t_final, dt, false);
}

Trajectory solve_bc_backward(const DiscreteGreenSystem& sys,
                             const ControlSignal& f, double t_final,
                             double dt) {
  if (!(t_final < 0.0)) {
    throw InvalidArgument("solve_bc_backward: t_final must be negative");
  }
  return integrate_controlled(sys, f, t_final, dt, true);
}

LiftedSolution solve_bc_lift(const DiscreteGreenSystem& sys,
                             const SelfAdjointExtension& ext,
                             const ControlSignal& f, double t_final,
                             const LiftOptions& opts) {
  check_signal(f);
  if (!(t_final > 0.0)) {
    throw InvalidArgument("solve_bc_lift: t_final must be positive");
  }
  if (f.t_start < -1e-12) {
    throw InvalidArgument(
        "boundary control must start at t >= 0 so the system starts at rest");
  }

  LiftedSolution out;
  if (t_final > sys.grid.length + 1e-12) {
    out.warnings.push_back(
        "evolution horizon exceeds the domain length; the controlled front "
        "reaches the far boundary and the transport picture breaks");
  }

  const DeficiencyBasis basis =
      opts.basis ? *opts.basis
                 : (opts.use_recurrence_modes ? recurrence_deficiency_modes(sys)
                                              : deficiency_modes(sys));
  // Mode columns ordered plus decaying, plus growing, minus decaying,
  // minus growing; the mode equation sign is +1 for the first two.
  Mat modes(sys.state_dim(), 4);
  modes.col(0) = basis.plus_modes.col(0);
  modes.col(1) = basis.plus_modes.col(1);
  modes.col(2) = basis.minus_modes.col(0);
  modes.col(3) = basis.minus_modes.col(1);
  const Eigen::Vector4d signs(1.0, 1.0, -1.0, -1.0);

  // Boundary-trace matrix of the basis; the gauge solves G a = (1, 0).
  Mat g1(2, 4);
  for (int m = 0; m < 4; ++m) g1.col(m) = sys.gamma1(modes.col(m));

  Eigen::Vector4cd a = Eigen::Vector4cd::Zero();
  Vec target(2);
  target << 1.0, 0.0;
  auto solve_gauge = [&](int col_begin, int col_count) {
    const Mat sub = g1.middleCols(col_begin, col_count);
    Eigen::JacobiSVD<Mat> svd(sub);
    const double smin = svd.singularValues().minCoeff();
    if (svd.singularValues().size() < 2 || smin < 1e-8) {
      throw InvalidArgument(
          "lift gauge: boundary trace map of the selected modes is not "
          "surjective onto the port space");
    }
    const Vec coeff = least_squares(sub, target);
    for (int k = 0; k < col_count; ++k) a(col_begin + k) = coeff(k);
  };
  switch (opts.gauge) {
    case LiftGauge::minimal_norm:
      solve_gauge(0, 4);
      break;
    case LiftGauge::plus_only:
      solve_gauge(0, 2);
      break;
    case LiftGauge::minus_only:
      solve_gauge(2, 2);
      break;
  }
  out.gauge_weights = a;

  // Spectral coordinates of the restricted modes.
  const int kdim = ext.reduced_dim();
  Mat mc(kdim, 4);
  for (int m = 0; m < 4; ++m) {
    mc.col(m) = ext.spectrum.eigenvectors.adjoint() *
                (ext.reduced_weights.asDiagonal() *
                 ext.restrict_state(modes.col(m)));
  }

  const double dt0 = resolve_dt(sys.grid, opts.dt);
  const int steps =
      std::max(1, static_cast<int>(std::lround(t_final / dt0)));
  const double d = t_final / steps;
  const RealVec& lam = ext.spectrum.eigenvalues;

  // w(T) in spectral coordinates: integrate the mode-sourced forcing with a
  // piecewise-linear coefficient interpolant and exact subinterval weights,
  // so equal boundary traces give equal states no matter the gauge.
  Vec acc = Vec::Zero(kdim);
  Vec phase(kdim);
  for (int k = 0; k < kdim; ++k) phase(k) = std::exp(kI * (t_final * lam(k)));
  Vec e0(kdim), e1(kdim);
  for (int k = 0; k < kdim; ++k) filon_weights(lam(k), d, e0(k), e1(k));
  Vec shift(kdim);
  for (int k = 0; k < kdim; ++k) shift(k) = std::exp(-kI * (d * lam(k)));

  Eigen::Vector4cd gamma_now;
  Eigen::Vector4cd gamma_next;
  for (int m = 0; m < 4; ++m) gamma_now(m) = a(m) * f.value(0.0);
  for (int j = 0; j < steps; ++j) {
    const double fj1 = f.value((j + 1) * d);
    for (int m = 0; m < 4; ++m) gamma_next(m) = a(m) * fj1;
    const Eigen::Vector4cd gdot = (gamma_next - gamma_now) / d;
    Eigen::Vector4cd mixed;
    for (int m = 0; m < 4; ++m) {
      mixed(m) = gdot(m) + signs(m) * gamma_now(m);
    }
    Eigen::Vector4cd slope;
    for (int m = 0; m < 4; ++m) slope(m) = signs(m) * gdot(m);
    const Vec c0 = mc * mixed;
    const Vec c1 = mc * slope;
    acc.array() +=
        phase.array() * (c0.array() * e0.array() + c1.array() * e1.array());
    phase.array() *= shift.array();
    gamma_now = gamma_next;
  }

  Vec u = ext.prolong_state(ext.spectrum.eigenvectors * (-acc));
  const double f_final = f.value(t_final);
  if (f_final != 0.0) u += f_final * (modes * a);
  out.state = u;
  return out;
}

}  // namespace bclab
