#include "bclab/numerics.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

namespace bclab {

Grid Grid::uniform(int n, double length) {
  if (n < 8) {
    throw InvalidArgument("grid needs at least 8 nodes, got " +
                          std::to_string(n));
  }
  if (!(length > 0.0)) {
    throw InvalidArgument("grid length must be positive");
  }
  Grid g;
  g.n = n;
  g.length = length;
  g.h = length / (n - 1);
  g.nodes = RealVec::LinSpaced(n, 0.0, length);
  g.weights = RealVec::Constant(n, g.h);
  g.weights(0) = 0.5 * g.h;
  g.weights(n - 1) = 0.5 * g.h;
  return g;
}

Eigen::MatrixXd sbp_derivative(const Grid& grid) {
  const int n = grid.n;
  const double h = grid.h;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  d(0, 0) = -1.0 / h;
  d(0, 1) = 1.0 / h;
  for (int j = 1; j + 1 < n; ++j) {
    d(j, j - 1) = -0.5 / h;
    d(j, j + 1) = 0.5 / h;
  }
  d(n - 1, n - 2) = -1.0 / h;
  d(n - 1, n - 1) = 1.0 / h;
  return d;
}

Complex weighted_dot(const Vec& u, const Vec& v, const RealVec& w) {
  if (u.size() != v.size() || u.size() != w.size()) {
    throw InvalidArgument("weighted_dot: size mismatch");
  }
  return (w.array() * u.array() * v.array().conjugate()).sum();
}

double weighted_norm(const Vec& u, const RealVec& w) {
  if (u.size() != w.size()) {
    throw InvalidArgument("weighted_norm: size mismatch");
  }
  return std::sqrt((w.array() * u.array().abs2()).sum());
}

SpectralDecomposition hermitian_eig(const Mat& m, const RealVec& w) {
  if (m.rows() != m.cols() || m.rows() != w.size()) {
    throw InvalidArgument("hermitian_eig: shape mismatch");
  }
  if ((w.array() <= 0.0).any()) {
    throw InvalidArgument("hermitian_eig: weights must be positive");
  }
  // Hermitian with respect to diag(w) means W M = M^* W.
  const Mat wm = w.asDiagonal() * m;
  const double asym = (wm - wm.adjoint()).norm();
  const double scale = std::max(wm.norm(), 1e-300);
  if (asym > 1e-10 * scale) {
    std::ostringstream msg;
    msg << "hermitian_eig: matrix is not weighted-Hermitian, relative "
        << "asymmetry " << asym / scale;
    throw InvalidArgument(msg.str());
  }
  const RealVec sqrt_w = w.array().sqrt();
  const RealVec inv_sqrt_w = sqrt_w.cwiseInverse();
  const Mat sym = sqrt_w.asDiagonal() * m * inv_sqrt_w.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Mat> solver(0.5 * (sym + sym.adjoint()));
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eig: eigensolver failed");
  }
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = inv_sqrt_w.asDiagonal() * solver.eigenvectors();
  return out;
}

OrthoBasis svd_orthobasis(const Mat& snapshots, const RealVec& w,
                          double rel_tol) {
  if (snapshots.rows() != w.size()) {
    throw InvalidArgument("svd_orthobasis: shape mismatch");
  }
  if (!(rel_tol > 0.0)) {
    throw InvalidArgument("svd_orthobasis: rel_tol must be positive");
  }
  const RealVec sqrt_w = w.array().sqrt();
  const RealVec inv_sqrt_w = sqrt_w.cwiseInverse();
  Eigen::BDCSVD<Mat> svd(sqrt_w.asDiagonal() * snapshots,
                         Eigen::ComputeThinU);
  OrthoBasis out;
  out.singular_values = svd.singularValues();
  const double top =
      out.singular_values.size() > 0 ? out.singular_values(0) : 0.0;
  int rank = 0;
  for (int k = 0; k < out.singular_values.size(); ++k) {
    if (out.singular_values(k) > rel_tol * top && top > 0.0) ++rank;
  }
  out.rank = rank;
  out.basis = inv_sqrt_w.asDiagonal() * svd.matrixU().leftCols(rank);
  return out;
}

Vec least_squares(const Mat& a, const Vec& b) {
  if (a.rows() != b.size()) {
    throw InvalidArgument("least_squares: shape mismatch");
  }
  return a.completeOrthogonalDecomposition().solve(b);
}

namespace {

void check_samples(Eigen::Index count, Quadrature rule) {
  if (count < 2) {
    throw InvalidArgument("integrate_time: need at least 2 samples");
  }
  if (rule == Quadrature::simpson && count % 2 == 0) {
    throw InvalidArgument(
        "integrate_time: Simpson rule needs an odd sample count");
  }
}

}  // namespace

Complex integrate_time(const Vec& samples, double dt, Quadrature rule) {
  check_samples(samples.size(), rule);
  const Eigen::Index m = samples.size();
  Complex acc = 0.0;
  if (rule == Quadrature::trapezoid) {
    acc = 0.5 * (samples(0) + samples(m - 1));
    for (Eigen::Index j = 1; j + 1 < m; ++j) acc += samples(j);
    return acc * dt;
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    const double c = (j == 0 || j == m - 1) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    acc += c * samples(j);
  }
  return acc * (dt / 3.0);
}

Vec integrate_time(const Mat& samples, double dt, Quadrature rule) {
  check_samples(samples.cols(), rule);
  const Eigen::Index m = samples.cols();
  Vec acc;
  if (rule == Quadrature::trapezoid) {
    acc = 0.5 * (samples.col(0) + samples.col(m - 1));
    for (Eigen::Index j = 1; j + 1 < m; ++j) acc += samples.col(j);
    return acc * dt;
  }
  acc = samples.col(0) + samples.col(m - 1);
  for (Eigen::Index j = 1; j + 1 < m; ++j) {
    acc += (j % 2 == 1 ? 4.0 : 2.0) * samples.col(j);
  }
  return acc * (dt / 3.0);
}

}  // namespace bclab
