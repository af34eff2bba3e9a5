#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace bclab {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;

/// Error for inputs that violate a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform grid on [0, length] with summation-by-parts quadrature weights
/// (half weight at both endpoints).
struct Grid {
  int n = 0;
  double length = 0.0;
  double h = 0.0;
  RealVec nodes;
  RealVec weights;

  static Grid uniform(int n, double length);
};

/// First-derivative matrix D = H^{-1} Q of a first-order diagonal-norm
/// summation-by-parts pair: one-sided rows at the ends, centered inside.
Eigen::MatrixXd sbp_derivative(const Grid& grid);

/// Weighted inner product sum_j w_j u_j conj(v_j), linear in the first slot.
Complex weighted_dot(const Vec& u, const Vec& v, const RealVec& w);

/// Norm induced by weighted_dot.
double weighted_norm(const Vec& u, const RealVec& w);

/// Eigendecomposition of a matrix that is Hermitian with respect to the
/// weighted inner product, i.e. W M = M^* W for W = diag(w).
struct SpectralDecomposition {
  RealVec eigenvalues;   // ascending
  Mat eigenvectors;      // columns, orthonormal in the weighted inner product
};

SpectralDecomposition hermitian_eig(const Mat& m, const RealVec& w);

/// Weighted-orthonormal basis of the column span of a snapshot matrix.
struct OrthoBasis {
  Mat basis;               // weighted-orthonormal columns spanning the range
  RealVec singular_values; // descending, all of them
  int rank = 0;            // count of singular values above rel_tol * largest
};

OrthoBasis svd_orthobasis(const Mat& snapshots, const RealVec& w,
                          double rel_tol = 1e-8);

/// Minimal-norm least-squares solution of a x = b.
Vec least_squares(const Mat& a, const Vec& b);

enum class Quadrature { trapezoid, simpson };

/// Integrate uniformly sampled scalar values with step dt.
Complex integrate_time(const Vec& samples, double dt,
                       Quadrature rule = Quadrature::trapezoid);

/// Integrate uniformly sampled vector values (one column per sample).
Vec integrate_time(const Mat& samples, double dt,
                   Quadrature rule = Quadrature::trapezoid);

}  // namespace bclab
