#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "bclab/numerics.hpp"

using namespace bclab;

namespace {

Mat random_complex(int rows, int cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = Complex(gauss(rng), gauss(rng));
  }
  return m;
}

}  // namespace

TEST_CASE("uniform grid carries trapezoid weights that sum to the length") {
  const Grid g = Grid::uniform(33, 2.0);
  CHECK(g.n == 33);
  CHECK(g.h == doctest::Approx(2.0 / 32).epsilon(1e-15));
  CHECK(g.nodes(0) == 0.0);
  CHECK(g.nodes(32) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(g.weights(0) == doctest::Approx(g.h / 2).epsilon(1e-15));
  CHECK(g.weights(32) == doctest::Approx(g.h / 2).epsilon(1e-15));
  CHECK(g.weights(5) == doctest::Approx(g.h).epsilon(1e-15));
  CHECK(g.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(Grid::uniform(4, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Grid::uniform(33, -1.0), InvalidArgument);
}

TEST_CASE("derivative matrix satisfies summation by parts exactly") {
  const Grid g = Grid::uniform(41, 1.7);
  const Eigen::MatrixXd d = sbp_derivative(g);
  const Eigen::MatrixXd q = g.weights.asDiagonal() * d;
  Eigen::MatrixXd boundary = Eigen::MatrixXd::Zero(g.n, g.n);
  boundary(0, 0) = -1.0;
  boundary(g.n - 1, g.n - 1) = 1.0;
  CHECK((q + q.transpose() - boundary).cwiseAbs().maxCoeff() <= 1e-14);

  // exact on affine functions everywhere, including the one-sided rows
  const Eigen::VectorXd lin = 3.0 * g.nodes.array() + 1.0;
  CHECK(((d * lin).array() - 3.0).abs().maxCoeff() <= 1e-12);

  // second order in the interior
  const Eigen::VectorXd sq = g.nodes.array().square();
  const Eigen::VectorXd dsq = d * sq;
  for (int j = 1; j < g.n - 1; ++j) {
    CHECK(dsq(j) == doctest::Approx(2.0 * g.nodes(j)).epsilon(1e-12));
  }
}

TEST_CASE("weighted inner product is linear in u and conjugates v") {
  RealVec w(2);
  w << 2.0, 3.0;
  Vec u(2), v(2);
  u << Complex(0, 1), 0.0;
  v << 1.0, 0.0;
  const Complex d = weighted_dot(u, v, w);
  CHECK(d.real() == doctest::Approx(0.0));
  CHECK(d.imag() == doctest::Approx(2.0));
  CHECK(std::abs(weighted_dot(v, u, w) - std::conj(d)) <= 1e-15);
  CHECK(weighted_norm(u, w) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(weighted_dot(u, Vec(3), w), InvalidArgument);
}

TEST_CASE("hermitian_eig reconstructs weighted-Hermitian matrices") {
  const int n = 24;
  RealVec w = RealVec::LinSpaced(n, 0.5, 2.0);
  // W M must be Hermitian: M = W^{-1} C with C Hermitian
  const Mat a = random_complex(n, n, 11);
  const Mat c = a + a.adjoint();
  const Mat m = w.cwiseInverse().asDiagonal() * c;

  const SpectralDecomposition sd = hermitian_eig(m, w);
  const Mat v = sd.eigenvectors;
  const Mat recon = v * sd.eigenvalues.asDiagonal() * v.adjoint() *
                    Mat(w.asDiagonal());
  CHECK((recon - m).cwiseAbs().maxCoeff() <=
        1e-12 * m.cwiseAbs().maxCoeff());

  const Mat gram = v.adjoint() * (w.asDiagonal() * v);
  CHECK((gram - Mat::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-12);

  for (int k = 1; k < n; ++k) {
    CHECK(sd.eigenvalues(k - 1) <= sd.eigenvalues(k) + 1e-14);
  }
}

TEST_CASE("hermitian_eig rejects matrices that are not weighted-Hermitian") {
  RealVec w = RealVec::Ones(5);
  Mat m = random_complex(5, 5, 3);
  m(0, 1) += Complex(1.0, 0.0);  // break any accidental symmetry
  CHECK_THROWS_AS(hermitian_eig(m, w), InvalidArgument);
}

TEST_CASE("svd_orthobasis finds the rank and matches the Gram oracle") {
  const int dim = 40;
  RealVec w = RealVec::LinSpaced(dim, 0.2, 1.3);
  const Mat gen = random_complex(dim, 3, 7);
  // seven snapshots drawn from a three-dimensional space
  Mat snaps(dim, 7);
  const Mat coef = random_complex(3, 7, 8);
  snaps = gen * coef;

  const OrthoBasis ob = svd_orthobasis(snaps, w, 1e-10);
  CHECK(ob.rank == 3);
  CHECK(ob.basis.cols() == 3);
  const Mat gram = ob.basis.adjoint() * (w.asDiagonal() * ob.basis);
  CHECK((gram - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);

  // independent oracle: eigenvalues of the weighted Gram matrix pin the
  // significant singular values; below sqrt(eps) the Gram route loses them,
  // so the tail is only bounded
  const Mat big_gram = snaps.adjoint() * (w.asDiagonal() * snaps);
  Eigen::SelfAdjointEigenSolver<Mat> es(big_gram);
  RealVec gram_sv = es.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
  REQUIRE(ob.singular_values.size() == gram_sv.size());
  for (int k = 0; k < 3; ++k) {
    CHECK(ob.singular_values(k) ==
          doctest::Approx(gram_sv(k)).epsilon(1e-9).scale(gram_sv(0)));
  }
  for (int k = 3; k < 7; ++k) {
    CHECK(ob.singular_values(k) <= 1e-12 * gram_sv(0));
    CHECK(gram_sv(k) <= 1e-6 * gram_sv(0));
  }

  // every snapshot is reproduced by the basis
  const Mat proj = ob.basis * (ob.basis.adjoint() * (w.asDiagonal() * snaps));
  CHECK((proj - snaps).cwiseAbs().maxCoeff() <=
        1e-10 * snaps.cwiseAbs().maxCoeff());
}

TEST_CASE("least_squares returns the minimal-norm solution") {
  Mat a(1, 2);
  a << 1.0, 1.0;
  Vec b(1);
  b << 2.0;
  const Vec x = least_squares(a, b);
  CHECK(std::abs(x(0) - Complex(1.0)) <= 1e-13);
  CHECK(std::abs(x(1) - Complex(1.0)) <= 1e-13);
}

TEST_CASE("time quadrature is exact on its design class") {
  // trapezoid: affine integrands over [0, 1] at spacing 1/2
  Vec f3(3);
  for (int j = 0; j < 3; ++j) f3(j) = 2.0 * (0.5 * j) + 1.0;
  CHECK(std::abs(integrate_time(f3, 0.5, Quadrature::trapezoid) -
                 Complex(2.0)) <= 1e-14);

  // simpson: cubics over [0, 1] at spacing 1/4
  Vec f5(5);
  for (int j = 0; j < 5; ++j) f5(j) = std::pow(0.25 * j, 3);
  CHECK(std::abs(integrate_time(f5, 0.25, Quadrature::simpson) -
                 Complex(0.25)) <= 1e-14);

  CHECK_THROWS_AS(integrate_time(Vec(1), 0.5, Quadrature::trapezoid),
                  InvalidArgument);
  // simpson needs an odd number of samples
  CHECK_THROWS_AS(integrate_time(Vec(4), 0.25, Quadrature::simpson),
                  InvalidArgument);
}

TEST_CASE("matrix quadrature integrates columns of sampled trajectories") {
  const double dt = 0.5;  // five samples spanning [0, 2]
  Mat samples(3, 5);
  for (int j = 0; j < 5; ++j) {
    const double t = dt * j;
    samples(0, j) = t;
    samples(1, j) = Complex(0.0, 1.0) * t * t;
    samples(2, j) = 1.0;
  }
  const Vec v = integrate_time(samples, dt, Quadrature::simpson);
  CHECK(std::abs(v(0) - Complex(2.0)) <= 1e-14);
  CHECK(std::abs(v(1) - Complex(0.0, 8.0 / 3.0)) <= 1e-14);
  CHECK(std::abs(v(2) - Complex(2.0)) <= 1e-14);
}
