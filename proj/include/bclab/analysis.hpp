#pragma once

#include "bclab/boundary_control.hpp"

namespace bclab {

/// Family of port controls used to probe the reachable set.
std::vector<ControlSignal> default_bump_family(int count = 20);

struct ReachabilityOptions {
  double t_final = 1.0;
  double dt = 0.0;           // 0 picks h / 2
  double rank_rel_tol = 1e-8;
  bool backward = false;
};

/// Snapshot study of the states reachable from rest through the port.
struct ReachabilityReport {
  std::string direction;              // "forward" or "backward"
  int n_controls = 0;
  int rank = 0;
  RealVec singular_values;            // descending
  int rank_at_loose_tol = 0;          // rel_tol 1e-7
  int rank_at_tight_tol = 0;          // rel_tol 1e-9
  double max_polarization_residual = 0.0;  // wrong-polarization fraction
  double max_tail_mass = 0.0;              // mass beyond x = t_final, relative
  /// Largest angle by which a predicted-unreachable direction (wrong
  /// polarization inside the window, or supported beyond the front) leans
  /// into the estimated reachable span. Near zero when the snapshot span
  /// misses exactly what the transport picture says it must miss.
  double max_unreachable_overlap_deg = 0.0;
  Mat span;                            // weighted-orthonormal basis columns

  /// Projector onto the estimated unreachable subspace, I - B (B* W).
  Mat unreachable_projector(const RealVec& w) const;
};

ReachabilityReport snapshot_reachable(const DiscreteGreenSystem& sys,
                                      const std::vector<ControlSignal>& family,
                                      const ReachabilityOptions& opts = {});

/// Smallest principal angle (degrees) between two weighted-orthonormal spans.
double smallest_principal_angle_deg(const Mat& span_a, const Mat& span_b,
                                    const RealVec& w);

/// One duality identity check: lhs, rhs, and the residual scaled by
/// ||f||_{L2} ||y||_W.
struct DualityCheck {
  Complex lhs{};
  Complex rhs{};
  double residual = 0.0;
  double scale = 1.0;
  double rel_residual = 0.0;
};

/// (u^f(T), y)_W = i int_0^T f(t) conj((G2 v^y)(t - T))_0 dt with
/// v^y(s) = exp(i s L) y.
DualityCheck check_auxiliary(const DiscreteGreenSystem& sys,
                             const SelfAdjointExtension& ext,
                             const ControlSignal& f, const Vec& y,
                             double t_final, double dt = 0.0);

/// int_0^T (y, u^f(t))_W dt = i int_0^T ((G2 w^{y,T})(t), f(t))_B dt with
/// w^{y,T}(t) the integrated free trajectory started at T.
DualityCheck check_aux1(const DiscreteGreenSystem& sys,
                        const SelfAdjointExtension& ext,
                        const ControlSignal& f, const Vec& y, double t_final,
                        double dt = 0.0);

/// (u^f(T), w^y(t))_W = int_0^T (u^f(s), y)_W ds
///                      + i int_0^T (f(s), (G2 w^y)(s + t - T))_B ds
/// for t <= 0, with w^y the integrated free trajectory started at 0.
DualityCheck check_aux2(const DiscreteGreenSystem& sys,
                        const SelfAdjointExtension& ext,
                        const ControlSignal& f, const Vec& y, double t_final,
                        double t_eval, double dt = 0.0);

/// Constant-coefficient operator on the half line whose deficiency indices
/// are computed symbolically and by a shooting oracle.
struct OperatorSpec {
  std::string name;
  Eigen::Matrix2cd v_inf = Eigen::Matrix2cd::Zero();
  /// Restrict to the polarization span{pol} when set; pol must be an
  /// eigenvector of J.
  bool polarized = false;
  Eigen::Vector2cd pol = Eigen::Vector2cd::Zero();
  enum class BoundaryCondition { none, first_component_zero, full_zero };
  BoundaryCondition bc = BoundaryCondition::full_zero;

  static OperatorSpec minimal();          // J d/dx, u(0) = 0
  static OperatorSpec whole_line_selfadjoint();  // J d/dx, u1(0) = 0
  static OperatorSpec polarized_part();   // -i d/dx on (1,-i), psi(0) = 0
  static OperatorSpec polarized_mirror(); // +i d/dx on (1, i), psi(0) = 0
};

struct DeficiencyIndices {
  int n_plus = 0;   // dim Ker(adjoint + i)
  int n_minus = 0;  // dim Ker(adjoint - i)
};

/// Closed-form indices from the characteristic exponents at infinity
/// intersected with the adjoint boundary conditions.
DeficiencyIndices deficiency_indices(const OperatorSpec& spec);

/// Independent oracle: integrate the mode equation along the half line and
/// count square-integrable directions by their measured decay.
DeficiencyIndices shooting_deficiency_indices(const OperatorSpec& spec,
                                              double x_max = 40.0,
                                              double dx = 1e-3);

/// Classification of the (1,-i)-polarized invariant subspace and its
/// mirror.  The part of the minimal operator in that subspace has indices
/// (0, 1), placing it in the class of maximal dissipative-type restrictions;
/// the mirror part has (1, 0) and is maximal but outside the class.
struct PartClassification {
  double invariance_residual = 0.0;  // operator leakage out of the subspace
  double invariance_budget = 0.0;    // 10 h^2
  bool invariant = false;
  DeficiencyIndices indices;         // of the part's minimal operator
  bool in_class_m = false;           // n_plus = 0, n_minus = 1
  bool is_maximal = false;           // min(n_plus, n_minus) = 0
  DeficiencyIndices mirror_indices;
  bool mirror_in_class_m = false;
  bool mirror_is_maximal = false;
  double probe_ratio = 0.0;          // decay-relation falsifiability probe
  bool probe_consistent = false;
};

PartClassification classify_part(const DiscreteGreenSystem& sys,
                                 const SelfAdjointExtension& ext);

/// Fixed smooth state satisfying the domain constraints, used by the
/// duality scenarios.
Vec smooth_constrained_profile(const Grid& grid);

}  // namespace bclab
