#pragma once

#include "nlfb/analysis.hpp"
#include "nlfb/nonlocal.hpp"

namespace nlfb {

/// Solves the collocation system Lu = f on omega with u = g elsewhere
/// (grid complement and exterior descriptor both taken from g). The
/// omega-restricted matrix is symmetric positive definite with Z-structure,
/// so the dense LDLT factorization cannot fail; monotonicity (f1 <= f2,
/// g1 <= g2 implies u1 <= u2) is inherited from the M-matrix property.
GridFunction solve_dirichlet(const OperatorWeights& w, const Region& omega,
                             const GridFunction& f, const GridFunction& g,
                             Exec exec = Exec::Parallel);

GridFunction solve_dirichlet(const Kernel& k, const Region& omega,
                             const GridFunction& f, const GridFunction& g,
                             Exec exec = Exec::Parallel);

/// L-harmonic replacement of u in B: solve Lv = 0 in B, v = u outside.
GridFunction harmonic_replacement(const OperatorWeights& w,
                                  const GridFunction& u, const Region& B,
                                  Exec exec = Exec::Parallel);

/// Scalar projection coefficient Q = int_{B_r(z)} u b / int_{B_r(z)} b^2
/// by trapezoid quadrature on the grid cells clipped to the ball. Throws
/// when int b^2 < 1e-14.
double project_on_barrier(const GridFunction& u, const GridFunction& b,
                          double z, double r);

/// Distance of node i to the boundary of omega, half-cell convention: the
/// boundary sits midway between the last inside and first outside node.
double boundary_distance(const Grid& g, const Region& omega, int i);

/// Hopf-lemma check u >= c d^s: dyadic distance bands over
/// d in [4h, 0.25 diam(omega)], per-band infimum of u, log-log fit of the
/// band minima (exponent should track s). The returned coefficient is the
/// infimum of u / d^s over all banded nodes, not the regression intercept.
/// Invalid (degenerate branch, u == 0 alternative of the Hopf dichotomy)
/// when u is nonpositive somewhere in the interior.
ExponentFit hopf_check(const GridFunction& u, const Region& omega, double s);

}  // namespace nlfb
