#pragma once

#include <functional>

#include "bclab/green_system.hpp"

namespace bclab {

/// Propagator exp(i (t - t0) L) applied to a constrained state y.
/// Throws if y does not satisfy the domain constraints.
Vec propagate(const SelfAdjointExtension& ext, const Vec& y, double t0,
              double t);

/// Inhomogeneous evolution started from zero at time t0,
///
///   w(t) = (1/i) int_{t0}^{t} exp(i (t - s) L) g(s) ds,
///
/// with the source sampled uniformly at t0 + j dt, j = 0..m.  The sampler
/// is called once per node; quadrature is the trapezoid rule in spectral
/// coordinates.  Works for t above or below t0.
Vec duhamel(const SelfAdjointExtension& ext,
            const std::function<Vec(double)>& g, double t0, double t, int m);

/// Convenience overload taking precomputed samples as columns.
Vec duhamel(const SelfAdjointExtension& ext, const Mat& g_samples, double t0,
            double t);

/// Regularized form of the same solution,
///
///   w(t) = phi(t - t0, L) g(t0) + int_{t0}^{t} phi(t - s, L) g'(s) ds,
///   phi(s, lambda) = (1 - exp(i s lambda)) / lambda,
///
/// which stays finite across lambda = 0.  Needs the source derivative.
Vec duhamel_regularized(const SelfAdjointExtension& ext,
                        const std::function<Vec(double)>& g,
                        const std::function<Vec(double)>& g_prime, double t0,
                        double t, int m);

/// Time integral of the free trajectory, int_{t0}^{t} exp(i (s - t0) L) y ds,
/// evaluated spectrally in closed form.
Vec integrated_trajectory(const SelfAdjointExtension& ext, const Vec& y,
                          double t0, double t);

}  // namespace bclab
