#pragma once

#include "nlfb/onephase.hpp"

namespace nlfb {

enum class HalfSpaceRoute { Pipeline, TruncatedFixedPoint };

/// The half-space profile b: Lb = 0 on (0, R_window), b = 0 on (-inf, 0],
/// power tail of exponent s beyond the window, normalized b(1) = 1.
struct HalfSpaceSolution {
  Kernel kernel;   // kernel the stored profile annihilates (pipeline route:
                   // the final blow-up rescaling of the input kernel)
  GridFunction b;  // grid (0, R_window); zero left, power-s tail right
  HalfSpaceRoute route = HalfSpaceRoute::TruncatedFixedPoint;
  double c1 = 0.0;  // inf of b / x^s over window nodes (x >= h)
  double c2 = 0.0;  // sup of the same ratio
  double tail_amplitude = 0.0;   // amplitude of the attached x^s tail
  double fitted_exponent = 0.0;  // diagnostic growth fit, outermost decade

  double R_window() const { return b.grid().max; }
};

/// Per-level record of the pipeline construction.
struct PipelineDiagnostics {
  double chosen_M = 0.0;  // swept M of the Step-1 minimizer
  double x0 = 0.0;        // Step-1 free boundary point (half-cell convention)
  int levels = 0;
  std::vector<double> cauchy;  // sup difference of successive profiles
};

/// Lemma 5.1 pipeline: (Step 1) one-phase minimizer on (-1, 0) with
/// g = 1_(0,inf) and swept M; (Step 2) free boundary point x0 with a
/// positivity interval to its right; (Step 3) dyadic blow-up at x0 with
/// kernel rescaling and local re-minimization until successive window
/// profiles are 1e-3-Cauchy in sup norm. Throws with the Cauchy trace after
/// 12 levels.
HalfSpaceSolution build_halfspace_pipeline(const Kernel& k1,
                                           PipelineDiagnostics* diag = nullptr,
                                           Exec exec = Exec::Parallel);

/// Independent route: solve Lb = 0 on (0, R) with b = 0 on (-inf, 0] and
/// b = a x^s on [R, inf), iterating the tail amplitude a until it matches
/// the renormalized interior near R (the problem is linear in a, so the
/// iteration fixes after the first renormalized solve; the loop certifies
/// that). Throws after 50 iterations.
HalfSpaceSolution build_halfspace_truncated(const Kernel& k1, double R,
                                            int nodes_per_unit = 256,
                                            Exec exec = Exec::Parallel);

/// Lemma 5.2 report: central-difference b' on (4h, R_window/2); returns
/// (inf, sup) of b'(x) x^{1-s}.
std::pair<double, double> derivative_bounds_report(const HalfSpaceSolution& b);

/// Remark 5.3 probe: the quotient b(r)/r^s at dyadic r = R_window 2^{-j},
/// j = 1..decades. Exploratory output, no pass/fail.
struct QuotientProbe {
  std::vector<std::pair<double, double>> samples;  // (r, b(r)/r^s)
  double amplitude = 0.0;                          // max - min of the quotient
};

QuotientProbe quotient_oscillation_probe(const HalfSpaceSolution& b,
                                         int decades);

/// sup |Lb| over interior window nodes with x < frac * R_window, analytic
/// tail included.
double halfspace_residual_sup(const HalfSpaceSolution& b, double frac = 0.75,
                              Exec exec = Exec::Parallel);

}  // namespace nlfb
