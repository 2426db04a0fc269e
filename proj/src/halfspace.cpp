#include "nlfb/halfspace.hpp"

#include "nlfb/meshops.hpp"

#include <cmath>
#include <sstream>

namespace nlfb {

namespace {

// Window-edge node included as data carrying the analytic tail value.
GridFunction tail_data(const Grid& g, double a, double s) {
  double R = g.max;
  return GridFunction::sample(
      g, [&](double x) { return x >= R ? a * std::pow(x, s) : 0.0; },
      ExteriorSide::zero(), ExteriorSide::power(a, s));
}

// Validates the Theorem 1.3 shape invariants and records the envelope
// constants c1 <= b/x^s <= c2 over the window nodes.
void finalize(HalfSpaceSolution& hs) {
  const GridFunction& b = hs.b;
  const Grid& g = b.grid();
  double s = hs.kernel.s();
  if (b[0] != 0.0) throw std::runtime_error("halfspace: b(0) != 0");
  double c1 = std::numeric_limits<double>::infinity(), c2 = 0.0;
  double scale = b.values().maxCoeff();
  for (int i = 1; i < g.n; ++i) {
    if (b[i] <= 0.0) throw std::runtime_error("halfspace: b not positive");
    if (b[i] < b[i - 1] - 1e-9 * scale)
      throw std::runtime_error("halfspace: b not monotone");
    double q = b[i] / std::pow(g.x(i), s);
    c1 = std::min(c1, q);
    c2 = std::max(c2, q);
  }
  hs.c1 = c1;
  hs.c2 = c2;

  std::vector<std::pair<double, double>> outer;
  for (int k = 8; k >= 1; --k) {
    double r = g.max * std::pow(2.0, -k / 8.0);
    outer.emplace_back(r, b.eval(r));
  }
  hs.fitted_exponent = fit_growth(outer).exponent;
}

}  // namespace

HalfSpaceSolution build_halfspace_truncated(const Kernel& k1, double R,
                                            int nodes_per_unit, Exec exec) {
  if (k1.dim() != 1) throw std::invalid_argument("halfspace: 1D kernel only");
  if (R < 2.0) throw std::invalid_argument("halfspace: R >> 1 required");
  double s = k1.s();
  Grid g(0.0, R, static_cast<int>(std::lround(R * nodes_per_unit)) + 1);
  Region omega = Region::interval(1, g.n - 1);
  GridFunction f = GridFunction::constant(g, 0.0);
  OperatorWeights w = make_weights(k1, g);

  double xm = 0.9 * R;
  double a = 1.0;
  GridFunction b;
  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    b = solve_dirichlet(w, omega, f, tail_data(g, a, s), exec);
    double b1 = b.eval(1.0);
    if (!(b1 > 0.0)) throw std::runtime_error("halfspace: interior collapsed");
    double a_next = b.eval(xm) / (b1 * std::pow(xm, s));
    b.values() /= b1;
    bool done = std::abs(a_next - a) <= 1e-12 * std::max(1.0, std::abs(a));
    a = a_next;
    if (done) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw std::runtime_error("halfspace: tail amplitude did not settle");

  // Rebuild with the matched tail, then normalize values and tail together
  // so the stored profile still solves the equation exactly.
  b = solve_dirichlet(w, omega, f, tail_data(g, a, s), exec);
  double b1 = b.eval(1.0);
  b.values() /= b1;
  a /= b1;

  HalfSpaceSolution hs{k1,
                       GridFunction(g, b.values(), ExteriorSide::zero(),
                                    ExteriorSide::power(a, s)),
                       HalfSpaceRoute::TruncatedFixedPoint,
                       0.0,
                       0.0,
                       a,
                       0.0};
  finalize(hs);
  return hs;
}

HalfSpaceSolution build_halfspace_pipeline(const Kernel& k1,
                                           PipelineDiagnostics* diag,
                                           Exec exec) {
  if (k1.dim() != 1) throw std::invalid_argument("halfspace: 1D kernel only");
  double s = k1.s();

  // Step 1: one-phase minimizer on (-1, 0), exterior data 1_(0,inf).
  Grid g1(-1.25, 0.25, 2048);
  GridFunction data = GridFunction::sample(
      g1, [](double x) { return x > 0.0 ? 1.0 : 0.0; }, ExteriorSide::zero(),
      ExteriorSide::constant(1.0));
  OnePhaseProblem p1(k1, Region::open_interval(g1, -1.0, 0.0), 1.0, data);
  double M = 0.0;
  MinimizerResult step1 = minimize_swept_M(p1, M, exec);

  // Step 2: free boundary point = end of the last contact component that is
  // followed by positivity.
  int ic = -1;
  for (const auto& part : step1.contact.parts())
    if (step1.positivity.contains(part.end)) ic = part.end - 1;
  if (ic < 0)
    throw std::runtime_error(
        "halfspace: step-1 minimizer has no free boundary point");
  double x0 = g1.x(ic) + g1.h() / 2;

  // Step 3: dyadic blow-up at x0 with kernel rescaling and local
  // re-minimization on a fixed window, recentered at the current free
  // boundary each level.
  const Grid win(-2.0, 2.0, 1025);  // h = 1/256
  const int per_unit = 256;
  const double omega_half = 1.5;
  double r = 1.0 / 16.0;
  GridFunction v = blow_up(step1.u, s, x0, r, win);
  std::vector<double> cauchy;
  Eigen::VectorXd prev;
  MinimizerResult w;
  Kernel kr = k1;
  int level = 0;
  for (;; ++level) {
    if (level >= 12) {
      std::ostringstream msg;
      msg << "halfspace: blow-up not Cauchy after 12 levels; sup differences:";
      for (double c : cauchy) msg << ' ' << c;
      throw std::runtime_error(msg.str());
    }
    kr = rescale_kernel(k1, r);
    OnePhaseProblem pw(kr, Region::open_interval(win, -omega_half, omega_half),
                       M, v);
    w = minimize_alternating(pw, v, exec);

    int iw = -1;
    for (const auto& part : w.contact.parts())
      if (w.positivity.contains(part.end)) iw = part.end - 1;
    if (iw < 0 || std::abs(win.x(iw)) > 0.25)
      throw std::runtime_error("halfspace: blow-up free boundary drifted");

    // Compare normalized profiles aligned at the free boundary node (iw can
    // shift by a node between levels) on x - x(iw) in [-1, 1].
    double norm = w.u.node(iw + per_unit);
    Eigen::VectorXd prof(2 * per_unit + 1);
    for (int i = 0; i <= 2 * per_unit; ++i)
      prof[i] = w.u.node(iw - per_unit + i) / norm;
    if (prev.size() > 0) {
      double d = (prof - prev).cwiseAbs().maxCoeff();
      cauchy.push_back(d);
      if (d < 1e-3) {
        Grid gp(0.0, 1.25, 321);  // same spacing, node at 1
        Eigen::VectorXd bv(gp.n);
        for (int i = 0; i < gp.n; ++i) bv[i] = w.u.node(iw + i) / norm;
        bv[0] = 0.0;
        double a = bv[gp.n - 1] / std::pow(gp.max, s);
        HalfSpaceSolution hs{kr,
                             GridFunction(gp, bv, ExteriorSide::zero(),
                                          ExteriorSide::power(a, s)),
                             HalfSpaceRoute::Pipeline,
                             0.0,
                             0.0,
                             a,
                             0.0};
        finalize(hs);
        if (diag) *diag = {M, x0, level + 1, cauchy};
        return hs;
      }
    }
    prev = std::move(prof);
    r /= 2;
    v = blow_up(w.u, s, win.x(iw) + win.h() / 2, 0.5, win);
  }
}

std::pair<double, double> derivative_bounds_report(const HalfSpaceSolution& b) {
  const Grid& g = b.b.grid();
  double s = b.kernel.s(), h = g.h();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int i = 1; i < g.n - 1; ++i) {
    double x = g.x(i);
    if (x <= 4 * h || x > g.max / 2) continue;
    double d = (b.b[i + 1] - b.b[i - 1]) / (2 * h);
    double q = d * std::pow(x, 1.0 - s);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  return {lo, hi};
}

QuotientProbe quotient_oscillation_probe(const HalfSpaceSolution& b,
                                         int decades) {
  const Grid& g = b.b.grid();
  if (decades < 1 || g.max * std::pow(2.0, -decades) < 2 * g.h())
    throw std::invalid_argument("halfspace: window does not cover decades");
  QuotientProbe probe;
  double s = b.kernel.s();
  for (int j = 1; j <= decades; ++j) {
    double r = g.max * std::pow(2.0, -j);
    probe.samples.emplace_back(r, b.b.eval(r) / std::pow(r, s));
  }
  double lo = probe.samples[0].second, hi = lo;
  for (auto& [r, q] : probe.samples) {
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  probe.amplitude = hi - lo;
  return probe;
}

double halfspace_residual_sup(const HalfSpaceSolution& b, double frac,
                              Exec exec) {
  const Grid& g = b.b.grid();
  OperatorWeights w = make_weights(b.kernel, g);
  double sup = 0.0;
  int n = g.n;
#pragma omp parallel for schedule(static) reduction(max : sup) \
    if (exec == Exec::Parallel)
  for (int i = 1; i < n - 1; ++i) {
    if (g.x(i) >= frac * g.max) continue;
    sup = std::max(sup, std::abs(apply_node(w, b.b, i)));
  }
  return sup;
}

}  // namespace nlfb
