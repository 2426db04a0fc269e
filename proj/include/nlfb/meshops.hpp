#pragma once

#include "nlfb/grid.hpp"
#include "nlfb/nonlocal.hpp"

namespace nlfb {

/// tail(u; R, x0) = R^{2s} int_{|y-x0|>R} |u(y)| |y-x0|^{-1-2s} dy.
/// Grid cells are integrated by trapezoid quadrature against the exact
/// weight; the analytic exterior uses geometric panels with an envelope
/// remainder bound. Throws when the descriptor growth makes the integral
/// diverge (beta >= 2s).
double tail(const GridFunction& u, double s, double R, double x0,
            double tol = 1e-10);

/// [u]_{V^s(A|B)}: square root of the double integral of
/// (u(x)-u(y))^2 |x-y|^{-1-2s} over A x B, with u the piecewise-linear
/// interpolant. Computed exactly-for-piecewise-linear through the
/// z-convolution form int K(z) Phi(z) dz, Phi(z) = int (u(x)-u(x+z))^2 dx,
/// with graded panels toward z = 0; independent of the nodal weight
/// machinery in nonlocal.hpp.
double hs_seminorm(const GridFunction& u, double s, const Region& A,
                   const Region& B, Exec exec = Exec::Parallel);

/// Same double integral against an arbitrary kernel (used by the energy
/// cross-validation tests and the Lemma 4.3 style bounds).
double pair_energy(const GridFunction& u, const Kernel& k, const Region& A,
                   const Region& B, Exec exec = Exec::Parallel);

/// u_{r,x0}(x) = u(x0 + r x) / r^s resampled onto the target grid, with the
/// exterior descriptor transformed consistently (power exponents preserved,
/// amplitudes scaled by r^{beta-s}).
GridFunction blow_up(const GridFunction& u, double s, double x0, double r,
                     const Grid& target);

}  // namespace nlfb
