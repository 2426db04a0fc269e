#pragma once

#include "nlfb/halfspace.hpp"

namespace nlfb {

/// The obstacle problem min{Lu, u - phi} = 0 on R, u = 0 outside a
/// symmetric truncation window.
struct ObstacleProblem {
  Kernel kernel;
  Grid grid;         // symmetric window (-R, R)
  GridFunction phi;  // compactly supported obstacle, zero exterior

  /// Validates: 1D kernel, symmetric window, phi finite with zero
  /// descriptors and support inside the inner half of the window.
  ObstacleProblem(Kernel k, GridFunction phi_);
};

struct ObstacleResult {
  GridFunction u;
  GridFunction excess;  // u - phi, the paper's w
  Region contact;       // {u == phi} on stored values
  std::vector<double> free_boundary;  // contact boundary, half-cell convention
  double comp_residual = 0.0;  // max_i |min(Lu_i, u_i - phi_i)|
  double min_lu = 0.0;
  double min_excess = 0.0;
  double s = 0.0;
  int outer_iterations = 0;
  bool used_fallback = false;
};

struct ObstacleOptions {
  enum class Method { Auto, ActiveSet, ProjectedGaussSeidel };
  Method method = Method::Auto;
  double tol = 1e-8;
  int max_outer = 1000;
};

/// Primal-dual active-set iteration on the interior collocation LCP, with a
/// projected Gauss-Seidel fallback (Auto falls back when the active set has
/// not settled within 100 rounds). Rejects non-M-matrix assembly upfront;
/// throws at max_outer.
ObstacleResult solve_obstacle(const ObstacleProblem& p,
                              ObstacleOptions opts = {},
                              Exec exec = Exec::Parallel);

enum class FreeBoundaryClass { Regular, Degenerate };

/// Theorem 1.2 dichotomy at a free boundary point: log-log fit of
/// r -> sup_{B_r(x0)} (u - phi). Regular when the exponent is 1+s (+-0.1)
/// and the coefficient clears the resolution floor 10 h^{1+s}; degenerate
/// when the exponent is >= 1+s+0.1 or the coefficient is below the floor;
/// anything slower than 1+s-0.1 throws (under-resolved).
std::pair<FreeBoundaryClass, ExponentFit> classify_free_boundary_point(
    const ObstacleResult& r, double x0, const std::vector<double>& radii);

/// Global Hölder fit of u': dyadic modulus omega(delta) = max_i
/// |u'(x_i + delta) - u'(x_i)| of the central difference, log-log fitted.
/// The exponent is the largest alpha consistent with u' in C^{0,alpha}.
ExponentFit obstacle_regularity_report(const ObstacleResult& r);

/// Theorem 7.1(ii) expansion at a regular point: u - phi = c B((x-x0)e)
/// + O(|x-x0|^{1+s+gamma}), B the cumulative trapezoid integral of b.
/// Returns the projection coefficient c (innermost resolved window) and the
/// remainder growth fit.
std::pair<double, ExponentFit> expansion_fit(const ObstacleResult& r,
                                             double x0,
                                             const HalfSpaceSolution& b);

}  // namespace nlfb
