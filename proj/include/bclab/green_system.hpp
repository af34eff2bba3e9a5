#pragma once

#include <optional>
#include <vector>

#include "bclab/numerics.hpp"

namespace bclab {

/// Discretization of the two-component half-line operator J d/dx + V
/// truncated to [0, length], with the abstract Green identity
///
///   (A u, v)_W - (u, A v)_W = (G1 u, G2 v)_B - (G2 u, G1 v)_B
///
/// holding exactly on the grid.  States interleave the two components:
/// entry 2j is component one at node j, entry 2j+1 is component two.
/// The boundary space B is C^2 with ports (x = 0, x = length) and
///
///   G1 u = (u1(0), u1(X)),   G2 u = (u2(0), -u2(X)).
struct DiscreteGreenSystem {
  Grid grid;
  Mat op;                 // 2n x 2n action of J d/dx + V
  RealVec state_weights;  // quadrature weight per interleaved coordinate
  int boundary_dim = 2;

  int state_dim() const { return 2 * grid.n; }
  int port0_index() const { return 0; }          // coordinate fixed by G1 at x = 0
  int port1_index() const { return 2 * (grid.n - 1); }  // and at x = length

  Eigen::Vector2cd gamma1(const Vec& u) const;
  Eigen::Vector2cd gamma2(const Vec& u) const;
};

/// Potential attached to the operator: V = 0, a constant Hermitian matrix,
/// or one Hermitian matrix per node.
struct Potential {
  enum class Kind { zero, constant, varying } kind = Kind::zero;
  Eigen::Matrix2cd constant = Eigen::Matrix2cd::Zero();
  std::vector<Eigen::Matrix2cd> per_node;

  static Potential zero() { return {}; }
  static Potential constant_matrix(const Eigen::Matrix2cd& v);
  static Potential scalar(double c);
  static Potential varying(std::vector<Eigen::Matrix2cd> vs);

  bool is_zero() const { return kind == Kind::zero; }
  /// Constant real multiple of the identity, when the potential is one.
  std::optional<double> scalar_value() const;
};

DiscreteGreenSystem build_dirac(const Grid& grid,
                                const Potential& v = Potential::zero());

/// Defect of the Green identity for one pair of states,
/// (A u, v) - (u, A v) - [(G1 u, G2 v) - (G2 u, G1 v)].
Complex green_residual(const DiscreteGreenSystem& sys, const Vec& u,
                       const Vec& v);

/// Same defect with the boundary pairing restricted to the port at x = 0,
/// for states that vanish near x = length.
Complex green_residual_port0(const DiscreteGreenSystem& sys, const Vec& u,
                             const Vec& v);

/// Restriction of the operator to Ker G1 (both first-component boundary
/// values dropped), which is Hermitian in the weighted inner product and
/// generates the free unitary evolution.
struct SelfAdjointExtension {
  Grid grid;
  RealVec state_weights;      // full interleaved weights
  std::vector<int> kept;      // retained coordinates, ascending
  RealVec reduced_weights;
  Mat reduced;                // restricted operator matrix
  SpectralDecomposition spectrum;

  int full_dim() const { return 2 * grid.n; }
  int reduced_dim() const { return static_cast<int>(kept.size()); }

  /// Drop the two constrained coordinates.
  Vec restrict_state(const Vec& u) const;
  /// Re-embed with zeros in the constrained coordinates.
  Vec prolong_state(const Vec& ur) const;
  /// Whether both constrained coordinates vanish (within tol).
  bool is_constrained(const Vec& u, double tol = 1e-10) const;
};

SelfAdjointExtension extend_self_adjoint(const DiscreteGreenSystem& sys);

/// Boundary-space solutions of the mode equation (A - mu) phi = 0 for
/// mu = +i / -i, used to lift boundary data into the state space.
struct DeficiencyBasis {
  /// Columns: decaying mode first, then the reflected growing mode.
  Mat plus_modes;   // op phi = +i phi
  Mat minus_modes;  // op phi = -i phi
  bool analytic = true;
};

/// Analytic modes sampled on the grid.  Supported potentials: V = 0 and
/// constant real scalar V = c I.  The decaying plus mode at c = 0 is
/// e^{-x} (1, -i) and the minus mode is e^{-x} (1, i); growing partners
/// are normalized as e^{x - X}.
DeficiencyBasis deficiency_modes(const DiscreteGreenSystem& sys);

/// Exact discrete modes: (op - mu) phi = 0 on every row except the two
/// first-component boundary rows, pinned there to G1 phi = (1,0) / (0,1).
/// Valid for any supported potential; the leftover residual is confined to
/// the two coordinates outside Ker G1.
DeficiencyBasis recurrence_deficiency_modes(const DiscreteGreenSystem& sys);

}  // namespace bclab
