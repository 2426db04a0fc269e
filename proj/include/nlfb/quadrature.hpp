#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace nlfb {

/// One-dimensional quadrature helpers shared by the kernel-moment and
/// tail-integration code. Everything here is deterministic and pure.

// Nodes/weights of the 16-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss16();
const GaussRule& gauss32();

/// Integrate f over [a, b] with a fixed Gauss-Legendre rule.
double gauss(const std::function<double(double)>& f, double a, double b,
             const GaussRule& rule = gauss16());

/// Adaptive Gauss integration on [a, b]: bisects until the 16/32 point
/// estimates agree to tol (absolute + relative mix).
double adaptive(const std::function<double(double)>& f, double a, double b,
                double tol = 1e-12, int max_depth = 40);

/// tanh-sinh (double exponential) quadrature on a finite interval.
/// Robust against integrable endpoint singularities like (x-a)^alpha,
/// alpha > -1.
double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);

/// Integrate f over [t0, infinity) with geometric panels in log t.
/// remainder_bound(t) must be a nonincreasing upper bound on
/// |integral of f over [t, infinity)|; panels stop once it drops below tol.
double log_panels(const std::function<double(double)>& f, double t0,
                  const std::function<double(double)>& remainder_bound,
                  double tol, double ratio = std::sqrt(2.0),
                  int max_panels = 4000);

/// Closed-form power moment: integral of t^alpha over [a, b], 0 < a <= b,
/// with the log branch at alpha = -1.
double power_moment(double alpha, double a, double b);

/// integral of t^alpha over [a, infinity); requires alpha < -1.
double power_tail(double alpha, double a);

}  // namespace nlfb
