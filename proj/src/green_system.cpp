#include "bclab/green_system.hpp"

#include <Eigen/LU>
#include <cmath>

namespace bclab {

namespace {

const Eigen::Matrix2cd kJ = [] {
  Eigen::Matrix2cd j;
  j << 0.0, 1.0, -1.0, 0.0;
  return j;
}();

void require_hermitian(const Eigen::Matrix2cd& v) {
  if ((v - v.adjoint()).norm() > 1e-12 * std::max(1.0, v.norm())) {
    throw InvalidArgument("potential blocks must be Hermitian");
  }
}

}  // namespace

Potential Potential::constant_matrix(const Eigen::Matrix2cd& v) {
  require_hermitian(v);
  Potential p;
  p.kind = Kind::constant;
  p.constant = v;
  return p;
}

Potential Potential::scalar(double c) {
  Potential p;
  p.kind = Kind::constant;
  p.constant = c * Eigen::Matrix2cd::Identity();
  return p;
}

Potential Potential::varying(std::vector<Eigen::Matrix2cd> vs) {
  for (const auto& v : vs) require_hermitian(v);
  Potential p;
  p.kind = Kind::varying;
  p.per_node = std::move(vs);
  return p;
}

std::optional<double> Potential::scalar_value() const {
  if (kind == Kind::zero) return 0.0;
  if (kind != Kind::constant) return std::nullopt;
  const Complex a = constant(0, 0);
  const Complex b = constant(1, 1);
  const double off = std::abs(constant(0, 1)) + std::abs(constant(1, 0));
  if (off > 1e-14 || std::abs(a - b) > 1e-14 || std::abs(a.imag()) > 1e-14) {
    return std::nullopt;
  }
  return a.real();
}

Eigen::Vector2cd DiscreteGreenSystem::gamma1(const Vec& u) const {
  Eigen::Vector2cd g;
  g << u(0), u(2 * (grid.n - 1));
  return g;
}

Eigen::Vector2cd DiscreteGreenSystem::gamma2(const Vec& u) const {
  // The sign flip at the far port makes the discrete Green identity exact:
  // the boundary terms of the summation-by-parts product rule are
  // u1 conj(v2) - u2 conj(v1) evaluated at x = 0 minus the same at x = X.
  Eigen::Vector2cd g;
  g << u(1), -u(2 * (grid.n - 1) + 1);
  return g;
}

DiscreteGreenSystem build_dirac(const Grid& grid, const Potential& v) {
  if (v.kind == Potential::Kind::varying &&
      static_cast<int>(v.per_node.size()) != grid.n) {
    throw InvalidArgument("varying potential needs one block per node");
  }
  const int n = grid.n;
  const Eigen::MatrixXd d = sbp_derivative(grid);

  DiscreteGreenSystem sys;
  sys.grid = grid;
  sys.op = Mat::Zero(2 * n, 2 * n);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const Complex jab = kJ(a, b);
      if (jab != Complex(0.0)) {
        for (int r = 0; r < n; ++r) {
          for (int c = 0; c < n; ++c) {
            if (d(r, c) != 0.0) sys.op(2 * r + a, 2 * c + b) += jab * d(r, c);
          }
        }
      }
    }
  }
  for (int r = 0; r < n; ++r) {
    Eigen::Matrix2cd block;
    switch (v.kind) {
      case Potential::Kind::zero:
        block.setZero();
        break;
      case Potential::Kind::constant:
        block = v.constant;
        break;
      case Potential::Kind::varying:
        block = v.per_node[r];
        break;
    }
    sys.op.block<2, 2>(2 * r, 2 * r) += block;
  }

  sys.state_weights.resize(2 * n);
  for (int r = 0; r < n; ++r) {
    sys.state_weights(2 * r) = grid.weights(r);
    sys.state_weights(2 * r + 1) = grid.weights(r);
  }
  return sys;
}

namespace {

Complex boundary_pairing(const Eigen::Vector2cd& g1u,
                         const Eigen::Vector2cd& g2u,
                         const Eigen::Vector2cd& g1v,
                         const Eigen::Vector2cd& g2v, bool port0_only) {
  const int last = port0_only ? 1 : 2;
  Complex acc = 0.0;
  for (int p = 0; p < last; ++p) {
    acc += g1u(p) * std::conj(g2v(p)) - g2u(p) * std::conj(g1v(p));
  }
  return acc;
}

Complex green_defect(const DiscreteGreenSystem& sys, const Vec& u,
                     const Vec& v, bool port0_only) {
  if (u.size() != sys.state_dim() || v.size() != sys.state_dim()) {
    throw InvalidArgument("green_residual: state size mismatch");
  }
  const Vec au = sys.op * u;
  const Vec av = sys.op * v;
  const Complex interior = weighted_dot(au, v, sys.state_weights) -
                           weighted_dot(u, av, sys.state_weights);
  const Complex boundary = boundary_pairing(sys.gamma1(u), sys.gamma2(u),
                                            sys.gamma1(v), sys.gamma2(v),
                                            port0_only);
  return interior - boundary;
}

}  // namespace

Complex green_residual(const DiscreteGreenSystem& sys, const Vec& u,
                       const Vec& v) {
  return green_defect(sys, u, v, false);
}

Complex green_residual_port0(const DiscreteGreenSystem& sys, const Vec& u,
                             const Vec& v) {
  return green_defect(sys, u, v, true);
}

Vec SelfAdjointExtension::restrict_state(const Vec& u) const {
  if (u.size() != full_dim()) {
    throw InvalidArgument("restrict_state: size mismatch");
  }
  Vec out(reduced_dim());
  for (int k = 0; k < reduced_dim(); ++k) out(k) = u(kept[k]);
  return out;
}

Vec SelfAdjointExtension::prolong_state(const Vec& ur) const {
  if (ur.size() != reduced_dim()) {
    throw InvalidArgument("prolong_state: size mismatch");
  }
  Vec out = Vec::Zero(full_dim());
  for (int k = 0; k < reduced_dim(); ++k) out(kept[k]) = ur(k);
  return out;
}

bool SelfAdjointExtension::is_constrained(const Vec& u, double tol) const {
  if (u.size() != full_dim()) return false;
  const double scale = std::max(u.cwiseAbs().maxCoeff(), 1.0);
  return std::abs(u(0)) <= tol * scale &&
         std::abs(u(2 * (grid.n - 1))) <= tol * scale;
}

SelfAdjointExtension extend_self_adjoint(const DiscreteGreenSystem& sys) {
  SelfAdjointExtension ext;
  ext.grid = sys.grid;
  ext.state_weights = sys.state_weights;
  const int dim = sys.state_dim();
  const int c0 = sys.port0_index();
  const int c1 = sys.port1_index();
  ext.kept.reserve(dim - 2);
  for (int k = 0; k < dim; ++k) {
    if (k != c0 && k != c1) ext.kept.push_back(k);
  }
  const int rdim = static_cast<int>(ext.kept.size());
  ext.reduced_weights.resize(rdim);
  ext.reduced.resize(rdim, rdim);
  for (int r = 0; r < rdim; ++r) {
    ext.reduced_weights(r) = sys.state_weights(ext.kept[r]);
    for (int c = 0; c < rdim; ++c) {
      ext.reduced(r, c) = sys.op(ext.kept[r], ext.kept[c]);
    }
  }
  ext.spectrum = hermitian_eig(ext.reduced, ext.reduced_weights);
  return ext;
}

namespace {

/// Closed-form mode profiles for V = c I.  The plus pair solves
/// (J d/dx + cI) phi = +i phi, the minus pair the -i equation.
struct ModeProfiles {
  // decaying: rate_d * x, polarization pol_d; growing: rate_g * (x - X)
  Complex rate_d, rate_g;
  Eigen::Vector2cd pol_d, pol_g;
};

ModeProfiles analytic_profiles(double c, bool plus) {
  const Complex i(0.0, 1.0);
  ModeProfiles p;
  if (plus) {
    p.rate_d = Complex(-1.0, -c);
    p.pol_d << 1.0, -i;
    p.rate_g = Complex(1.0, c);
    p.pol_g << 1.0, i;
  } else {
    p.rate_d = Complex(-1.0, c);
    p.pol_d << 1.0, i;
    p.rate_g = Complex(1.0, -c);
    p.pol_g << 1.0, -i;
  }
  return p;
}

Vec sample_mode(const Grid& grid, Complex rate, const Eigen::Vector2cd& pol,
                double shift) {
  Vec u(2 * grid.n);
  for (int j = 0; j < grid.n; ++j) {
    const Complex e = std::exp(rate * (grid.nodes(j) - shift));
    u(2 * j) = e * pol(0);
    u(2 * j + 1) = e * pol(1);
  }
  return u;
}

}  // namespace

DeficiencyBasis deficiency_modes(const DiscreteGreenSystem& sys) {
  // Recover the potential blocks from the assembled operator (J has zero
  // diagonal, so diagonal-in-block entries are pure potential; the
  // off-diagonal entries pick up the derivative stencil only at the ends).
  const int n = sys.grid.n;
  const double h = sys.grid.h;
  const Complex c00 = sys.op(0, 0);
  bool scalar_ok = std::abs(c00.imag()) < 1e-12;
  const double c = c00.real();
  for (int j = 0; j < n && scalar_ok; ++j) {
    const double djj = j == 0 ? -1.0 / h : (j == n - 1 ? 1.0 / h : 0.0);
    const Eigen::Matrix2cd blk = sys.op.block<2, 2>(2 * j, 2 * j);
    const Complex v01 = blk(0, 1) - kJ(0, 1) * djj;
    scalar_ok = std::abs(v01) < 1e-12 && std::abs(blk(0, 0) - c00) < 1e-12 &&
                std::abs(blk(1, 1) - c00) < 1e-12;
  }
  if (!scalar_ok) {
    throw InvalidArgument(
        "deficiency_modes: analytic modes cover V = 0 and constant real "
        "scalar potentials only");
  }
  const Grid& grid = sys.grid;
  DeficiencyBasis basis;
  basis.analytic = true;
  basis.plus_modes.resize(2 * grid.n, 2);
  basis.minus_modes.resize(2 * grid.n, 2);
  const ModeProfiles pp = analytic_profiles(c, true);
  const ModeProfiles pm = analytic_profiles(c, false);
  basis.plus_modes.col(0) = sample_mode(grid, pp.rate_d, pp.pol_d, 0.0);
  basis.plus_modes.col(1) =
      sample_mode(grid, pp.rate_g, pp.pol_g, grid.length);
  basis.minus_modes.col(0) = sample_mode(grid, pm.rate_d, pm.pol_d, 0.0);
  basis.minus_modes.col(1) =
      sample_mode(grid, pm.rate_g, pm.pol_g, grid.length);
  return basis;
}

DeficiencyBasis recurrence_deficiency_modes(const DiscreteGreenSystem& sys) {
  const int dim = sys.state_dim();
  const int c0 = sys.port0_index();
  const int c1 = sys.port1_index();
  DeficiencyBasis basis;
  basis.analytic = false;
  basis.plus_modes.resize(dim, 2);
  basis.minus_modes.resize(dim, 2);
  const Complex i(0.0, 1.0);
  for (int sign = 0; sign < 2; ++sign) {
    const Complex mu = sign == 0 ? i : -i;
    // Replace the two first-component boundary rows of (op - mu) with
    // boundary-value pin rows; the result is invertible because mu is not
    // an eigenvalue of the constrained restriction.
    Mat b = sys.op - mu * Mat::Identity(dim, dim);
    b.row(c0).setZero();
    b(c0, c0) = 1.0;
    b.row(c1).setZero();
    b(c1, c1) = 1.0;
    Eigen::PartialPivLU<Mat> lu(b);
    for (int port = 0; port < 2; ++port) {
      Vec rhs = Vec::Zero(dim);
      rhs(port == 0 ? c0 : c1) = 1.0;
      Vec mode = lu.solve(rhs);
      if (sign == 0) {
        basis.plus_modes.col(port) = mode;
      } else {
        basis.minus_modes.col(port) = mode;
      }
    }
  }
  return basis;
}

}  // namespace bclab
