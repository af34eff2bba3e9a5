#include "bclab/free_dynamics.hpp"

#include <cmath>

namespace bclab {

namespace {

const Complex kI(0.0, 1.0);

/// Spectral coordinates of a reduced state with respect to the
/// weighted-orthonormal eigenbasis.
Vec to_spectral(const SelfAdjointExtension& ext, const Vec& reduced) {
  return ext.spectrum.eigenvectors.adjoint() *
         (ext.reduced_weights.asDiagonal() * reduced);
}

Vec require_constrained(const SelfAdjointExtension& ext, const Vec& y,
                        const char* who) {
  if (!ext.is_constrained(y)) {
    throw InvalidArgument(std::string(who) +
                          ": state violates the domain constraints");
  }
  return ext.restrict_state(y);
}

/// phi(s, lambda) = (1 - exp(i s lambda)) / lambda, finite across 0.
Complex phi_multiplier(double s, double lambda) {
  const double u = s * lambda;
  if (std::abs(u) < 1e-4) {
    return -kI * s *
           (1.0 + kI * (u / 2.0) - u * u / 6.0 - kI * (u * u * u / 24.0));
  }
  return (1.0 - std::exp(kI * u)) / lambda;
}

/// (exp(i s lambda) - 1) / (i lambda), finite across 0.
Complex integral_multiplier(double s, double lambda) {
  const double u = s * lambda;
  if (std::abs(u) < 1e-4) {
    return s * (1.0 + kI * (u / 2.0) - u * u / 6.0 - kI * (u * u * u / 24.0));
  }
  return (std::exp(kI * u) - 1.0) / (kI * lambda);
}

}  // namespace

Vec propagate(const SelfAdjointExtension& ext, const Vec& y, double t0,
              double t) {
  const Vec yr = require_constrained(ext, y, "propagate");
  Vec coef = to_spectral(ext, yr);
  const double s = t - t0;
  for (Eigen::Index k = 0; k < coef.size(); ++k) {
    coef(k) *= std::exp(kI * (s * ext.spectrum.eigenvalues(k)));
  }
  return ext.prolong_state(ext.spectrum.eigenvectors * coef);
}

Vec duhamel(const SelfAdjointExtension& ext,
            const std::function<Vec(double)>& g, double t0, double t, int m) {
  if (m < 1) {
    throw InvalidArgument("duhamel: need at least 2 source samples");
  }
  const double dts = (t - t0) / m;
  const int kdim = ext.reduced_dim();
  Vec acc = Vec::Zero(kdim);
  for (int j = 0; j <= m; ++j) {
    const double s = t0 + j * dts;
    Vec gr;
    if (j == 0) {
      gr = require_constrained(ext, g(s), "duhamel");
    } else {
      gr = ext.restrict_state(g(s));
    }
    Vec c = to_spectral(ext, gr);
    const double rem = t - s;
    for (int k = 0; k < kdim; ++k) {
      c(k) *= std::exp(kI * (rem * ext.spectrum.eigenvalues(k)));
    }
    const double wj = (j == 0 || j == m) ? 0.5 : 1.0;
    acc += wj * c;
  }
  acc *= dts / kI;
  return ext.prolong_state(ext.spectrum.eigenvectors * acc);
}

Vec duhamel(const SelfAdjointExtension& ext, const Mat& g_samples, double t0,
            double t) {
  if (g_samples.cols() < 2) {
    throw InvalidArgument("duhamel: need at least 2 source samples");
  }
  const int m = static_cast<int>(g_samples.cols()) - 1;
  const double dts = (t - t0) / m;
  return duhamel(
      ext,
      [&](double s) {
        const int j =
            static_cast<int>(std::lround((s - t0) / dts));
        return Vec(g_samples.col(j));
      },
      t0, t, m);
}

Vec duhamel_regularized(const SelfAdjointExtension& ext,
                        const std::function<Vec(double)>& g,
                        const std::function<Vec(double)>& g_prime, double t0,
                        double t, int m) {
  if (m < 1) {
    throw InvalidArgument(
        "duhamel_regularized: need at least 2 source samples");
  }
  const double dts = (t - t0) / m;
  const int kdim = ext.reduced_dim();
  const RealVec& lam = ext.spectrum.eigenvalues;

  Vec acc = to_spectral(
      ext, require_constrained(ext, g(t0), "duhamel_regularized"));
  for (int k = 0; k < kdim; ++k) acc(k) *= phi_multiplier(t - t0, lam(k));

  for (int j = 0; j <= m; ++j) {
    const double s = t0 + j * dts;
    Vec c = to_spectral(ext, ext.restrict_state(g_prime(s)));
    const double wj = (j == 0 || j == m) ? 0.5 : 1.0;
    for (int k = 0; k < kdim; ++k) {
      c(k) *= phi_multiplier(t - s, lam(k));
    }
    acc += (wj * dts) * c;
  }
  return ext.prolong_state(ext.spectrum.eigenvectors * acc);
}

Vec integrated_trajectory(const SelfAdjointExtension& ext, const Vec& y,
                          double t0, double t) {
  const Vec yr = require_constrained(ext, y, "integrated_trajectory");
  Vec coef = to_spectral(ext, yr);
  for (Eigen::Index k = 0; k < coef.size(); ++k) {
    coef(k) *= integral_multiplier(t - t0, ext.spectrum.eigenvalues(k));
  }
  return ext.prolong_state(ext.spectrum.eigenvectors * coef);
}

}  // namespace bclab
