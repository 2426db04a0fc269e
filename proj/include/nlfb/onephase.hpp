#pragma once

#include "nlfb/analysis.hpp"
#include "nlfb/dirichlet.hpp"
#include "nlfb/nonlocal.hpp"

namespace nlfb {

/// The one-phase functional I(u) = E_{(Omega^c x Omega^c)^c}(u,u)
/// + M |{u > 0} cap Omega| over admissible u (u = g outside Omega).
/// Positivity in the measure term is strict `> 0` on stored nodal values;
/// truncation and contact updates write exact 0.0.
struct OnePhaseProblem {
  Kernel kernel;
  Grid grid;
  Region omega;
  double M = 1.0;
  GridFunction g;

  /// Validates M > 0, g >= 0 (nodes and descriptors), g in L^1_{2s}.
  OnePhaseProblem(Kernel k, Region omega_, double M_, GridFunction g_);
};

struct EnergySplit {
  double dirichlet = 0.0;
  double measure = 0.0;
  /// False when g's descriptor growth makes the absolute Dirichlet energy
  /// divergent; dirichlet is then relative (constant term dropped).
  bool dirichlet_absolute = true;

  double total() const { return dirichlet + measure; }
};

struct MinimizerResult {
  GridFunction u;
  Region contact;     // {u = 0} cap Omega
  Region positivity;  // {u > 0} cap Omega
  EnergySplit energy;
  std::vector<double> trace;  // total energy after each sweep, nonincreasing
  double s = 0.0;
  bool exhaustive = true;  // brute force: full <=2-interval enumeration done
};

/// Energy split of an admissible u (values off Omega and descriptors are
/// taken from u itself).
EnergySplit energy(const OnePhaseProblem& p, const GridFunction& u,
                   Exec exec = Exec::Parallel);

/// Alternating minimization: (a) harmonic replacement on the positivity
/// set, (b) truncation to exact 0.0, (c) sequential flip/release sweep with
/// the exact rank-one energy difference (quadratic row test plus M h credit),
/// maintaining the gradient r = G u - l. Stops when a sweep makes no flips
/// and the energy decrease is < 1e-12; throws after 10^4 sweeps. u_init only
/// seeds the initial contact set {u_init <= 0}.
MinimizerResult minimize_alternating(const OnePhaseProblem& p,
                                     const GridFunction& u_init,
                                     Exec exec = Exec::Parallel);

/// Same, starting from the empty contact set.
MinimizerResult minimize_alternating(const OnePhaseProblem& p,
                                     Exec exec = Exec::Parallel);

/// Independent oracle: enumerate candidate contact sets, solve the Dirichlet
/// problem on each complement, evaluate I, return the best. Exhaustive over
/// all unions of <= 2 index intervals when the grid has <= 64 nodes;
/// otherwise a refined left-anchored interval scan (exhaustive = false).
MinimizerResult minimize_bruteforce_1d(const OnePhaseProblem& p,
                                       Exec exec = Exec::Parallel);

/// Dyadic M sweep starting at 2: returns the first minimizer whose contact
/// set and positivity set are both nonempty, doubling while the minimizer
/// stays everywhere positive, halving while it is identically zero, and
/// bisecting in log scale once both regimes are bracketed. chosen_M records
/// the value used.
MinimizerResult minimize_swept_M(OnePhaseProblem p, double& chosen_M,
                                 Exec exec = Exec::Parallel);

/// Discrete Lemma-4.1 certificate: Lu <= tol at interior Omega nodes,
/// |Lu| <= tol at interior positivity nodes (both neighbors positive),
/// u >= 0 everywhere.
struct ResidualCertificate {
  double max_lu_omega = 0.0;           // signed max over interior Omega nodes
  double max_abs_lu_positivity = 0.0;  // over interior positivity nodes
  double min_u = 0.0;                  // over all grid nodes
};

ResidualCertificate residual_certificate(const OnePhaseProblem& p,
                                         const MinimizerResult& r,
                                         Exec exec = Exec::Parallel);

/// Positivity-measure ratio |{u > 0} cap B_r(x0)| / |B_r(x0)| per radius,
/// counted nodewise; resolved flags r >= 4h.
struct DensitySample {
  double r = 0.0;
  double ratio = 0.0;
  bool resolved = false;
};

std::vector<DensitySample> density_report(const MinimizerResult& r, double x0,
                                          const std::vector<double>& radii);

/// sup_{B_r(x0)} u / r^s per radius; kappa is the smallest ratio. The
/// companion dist_coefficient is the infimum over positivity nodes of
/// u(x) / dist(x, boundary of {u > 0})^s (half-cell distance convention).
struct NondegeneracyReport {
  std::vector<std::pair<double, double>> sup_ratio;
  double kappa = 0.0;
  double dist_coefficient = 0.0;
};

NondegeneracyReport nondegeneracy_report(const MinimizerResult& r, double x0,
                                         const std::vector<double>& radii);

/// Log-log fit of r -> sup_{B_r(x0)} u; the exponent should equal s at a
/// free boundary point (C^s bound from above, non-degeneracy from below).
ExponentFit optimal_regularity_report(const MinimizerResult& r, double x0,
                                      const std::vector<double>& radii);

/// Defect of the min/max algebraic identity for the symmetrized pair sum:
///   (w1 v p1 - w2 v p2)^2 + (w1 ^ p1 - w2 ^ p2)^2
///     - (w1 - w2)^2 - (p1 - p2)^2
///     + 2 (w1 - p1)_+ (w2 - p2)_- + 2 (w1 - p1)_- (w2 - p2)_+ .
/// Identically zero. Keeping only the first cross term (the form in which
/// the identity enters the energy computation, where pairs are counted both
/// ways) gives a defect <= 0, i.e. the one-sided inequality.
double minmax_identity_gap(double w1, double p1, double w2, double p2);

}  // namespace nlfb
