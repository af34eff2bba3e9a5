#pragma once

#include <string>
#include <vector>

#include "bclab/free_dynamics.hpp"

namespace bclab {

enum class BumpShape { sin2, sin4 };

/// Scalar control signal acting on the port at x = 0: a windowed power of
/// sine bump, zero outside [t_start, t_end].  sin2 is C^1 in time, sin4 is
/// C^3.  Zero value and derivative at t = 0 make the control compatible
/// with a system starting at rest.
struct ControlSignal {
  BumpShape shape = BumpShape::sin4;
  double t_start = 0.0;
  double t_end = 1.0;
  double amplitude = 1.0;

  double value(double t) const;
  double derivative(double t) const;
  Vec sample(const RealVec& times) const;
  double l2_norm(double t0, double t1) const;
};

/// Trajectory on a uniform time grid; column j is the state at times[j].
struct Trajectory {
  RealVec times;
  Mat states;
  std::vector<std::string> warnings;

  const Mat& all() const { return states; }
  Vec at_final() const { return states.col(states.cols() - 1); }
};

/// Final state of the exact transport solution driven through the port at
/// x = 0: u(x, t) = f(t - x) (1, i), sampled at time t.  Valid while the
/// front stays inside the domain (t <= length).
Vec transport_oracle(const Grid& grid, const ControlSignal& f, double t);

/// Negative-time analogue u(x, t) = f(t + x) (1, -i) at time t <= 0.
Vec transport_oracle_backward(const Grid& grid, const ControlSignal& f,
                              double t);

enum class LiftGauge { minimal_norm, plus_only, minus_only };

struct LiftOptions {
  double dt = 0.0;                 // 0 picks h / 2
  LiftGauge gauge = LiftGauge::minimal_norm;
  bool use_recurrence_modes = true;  // exact discrete modes inside the solver
  /// Lift through this basis instead of building one; rejected when the
  /// boundary trace map on its span is not surjective.
  std::optional<DeficiencyBasis> basis;
};

/// Decomposition u = phi(t) + w(t) of the controlled solution, where
/// phi(t) is the deficiency-mode lift matching the boundary data and w
/// solves the constrained inhomogeneous problem it leaves behind.
struct LiftedSolution {
  Vec state;                        // u(T)
  Eigen::Vector4cd gauge_weights;   // lift coefficients per unit control value
  std::vector<std::string> warnings;
};

/// Boundary-control solve through the deficiency-mode lift.  The control
/// enters the first component at x = 0; the far port is held at zero.
LiftedSolution solve_bc_lift(const DiscreteGreenSystem& sys,
                             const SelfAdjointExtension& ext,
                             const ControlSignal& f, double t_final,
                             const LiftOptions& opts = {});

/// Direct Crank-Nicolson integration of i u_t + op u = 0 with the
/// boundary values imposed by row replacement each step.
Trajectory solve_bc_direct(const DiscreteGreenSystem& sys,
                           const ControlSignal& f, double t_final,
                           double dt = 0.0);

/// Negative-time solve on [t_final, 0], t_final < 0, driven by f(-t) at the
/// port; steps backwards from rest at t = 0.
Trajectory solve_bc_backward(const DiscreteGreenSystem& sys,
                             const ControlSignal& f, double t_final,
                             double dt = 0.0);

/// Projection coefficients onto the polarization orthogonal to the
/// direction filled by the forward (or backward) flow.  For the forward
/// flow the reachable polarization is (1, i) and the coefficient of
/// (1, -i) at node j is (u1_j + i u2_j) / 2.
Vec wrong_polarization_forward(const Vec& u, const Grid& grid);
Vec wrong_polarization_backward(const Vec& u, const Grid& grid);

/// Weighted norm of the state restricted to nodes with x > cutoff.
double tail_mass(const Vec& u, const Grid& grid, double cutoff);

}  // namespace bclab
