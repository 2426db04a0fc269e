#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nlfb/meshops.hpp"
#include "nlfb/onephase.hpp"

using namespace nlfb;

namespace {

GridFunction step_data(const Grid& g) {
  return GridFunction::sample(
      g, [](double x) { return x > 0.0 ? 1.0 : 0.0; }, ExteriorSide::zero(),
      ExteriorSide::constant(1.0));
}

// 64-node Step-1 fixture: fractional Laplacian s = 1/2, Omega = (-1,0),
// g = indicator of (0, infinity).
struct CoarseFixture {
  Kernel k = fractional_laplacian_kernel(1, 0.5);
  Grid g{-2.0, 1.0, 64};
  Region omega = Region::open_interval(g, -1.0, 0.0);
  GridFunction data = step_data(g);
};

// Fine fixture of the density / non-degeneracy / regularity battery:
// oscillating kernel in L^1_{1/2}(1,2), 2048 nodes, M = 6.
struct FineFixture {
  Kernel k = oscillating_kernel(1, 0.5, 1.0, 2.0, 3.0);
  Grid g{-1.25, 0.25, 2048};
  Region omega = Region::open_interval(g, -1.0, 0.0);
  GridFunction data = step_data(g);
  double M = 6.0;
  MinimizerResult r;
  double x0 = 0.0;  // free boundary point, half-cell convention

  FineFixture() {
    OnePhaseProblem p(k, omega, M, data);
    r = minimize_alternating(p);
    const auto& cp = r.contact.parts().back();
    x0 = g.x(cp.end - 1) + 0.5 * g.h();
  }
};

const FineFixture& fine() {
  static FineFixture f;
  return f;
}

MinimizerResult synthetic_result(const Grid& g,
                                 const std::function<double(double)>& f,
                                 double s) {
  MinimizerResult r;
  r.u = GridFunction::sample(g, f);
  std::vector<bool> pos(g.n, false), con(g.n, false);
  for (int i = 0; i < g.n; ++i) (r.u[i] > 0.0 ? pos : con)[i] = true;
  r.positivity = Region::from_mask(pos);
  r.contact = Region::from_mask(con);
  r.s = s;
  return r;
}

}  // namespace

TEST_CASE("energy: trivial splits") {
  CoarseFixture f;
  GridFunction zero = GridFunction::constant(f.g, 0.0);
  OnePhaseProblem p0(f.k, f.omega, 5.0, zero);
  EnergySplit e0 = energy(p0, zero);
  CHECK(e0.dirichlet == 0.0);
  CHECK(e0.measure == 0.0);

  Grid g(-2.0, 1.0, 301);  // h = 0.01
  Region om = Region::open_interval(g, -1.0, 0.0);
  GridFunction u = GridFunction::sample(
      g, [](double x) { return x > -1.0 && x < 0.0 ? 1.0 : 0.0; });
  OnePhaseProblem p(fractional_laplacian_kernel(1, 0.5), om, 10.0, u);
  EnergySplit e = energy(p, u);
  CHECK(std::abs(e.measure - 10.0) <= 10.0 * g.h());
  CHECK(e.dirichlet > 0.0);
}

TEST_CASE("minimize_alternating: zero data gives the zero minimizer") {
  CoarseFixture f;
  GridFunction zero = GridFunction::constant(f.g, 0.0);
  OnePhaseProblem p(f.k, f.omega, 3.0, zero);
  MinimizerResult r = minimize_alternating(p);
  CHECK(r.positivity.empty());
  CHECK(r.contact.count() == f.omega.count());
  for (int i = 0; i < f.g.n; ++i) CHECK(r.u[i] == 0.0);
  CHECK(r.energy.total() == 0.0);

  MinimizerResult b = minimize_bruteforce_1d(p);
  CHECK(b.positivity.empty());
  CHECK(b.energy.total() == 0.0);
}

TEST_CASE("Step-1 fixture: swept M yields an interior contact point") {
  CoarseFixture f;
  double M = 0.0;
  MinimizerResult r = minimize_swept_M(OnePhaseProblem(f.k, f.omega, 1.0, f.data), M);
  CHECK(M > 0.0);
  CHECK(!r.contact.empty());
  CHECK(!r.positivity.empty());
  // contact grows from the far side, positivity stays adjacent to the data
  CHECK(r.contact.parts().front().begin == f.omega.parts().front().begin);
  CHECK(r.positivity.parts().back().end == f.omega.parts().back().end);
  // energy trace is nonincreasing
  for (std::size_t i = 1; i < r.trace.size(); ++i)
    CHECK(r.trace[i] <= r.trace[i - 1] + 1e-12);
}

TEST_CASE("alternating matches the exhaustive brute force") {
  CoarseFixture f;
  for (double M : {0.25, 0.5, 0.75}) {
    OnePhaseProblem p(f.k, f.omega, M, f.data);
    MinimizerResult a = minimize_alternating(p);
    MinimizerResult b = minimize_bruteforce_1d(p);
    CHECK(b.exhaustive);
    REQUIRE(a.contact.parts().size() == b.contact.parts().size());
    for (std::size_t i = 0; i < a.contact.parts().size(); ++i) {
      CHECK(a.contact.parts()[i].begin == b.contact.parts()[i].begin);
      CHECK(a.contact.parts()[i].end == b.contact.parts()[i].end);
    }
    CHECK(std::abs(a.energy.total() - b.energy.total()) <= 1e-8);
    // the interval ansatz holds at this scale
    CHECK(b.contact.parts().size() <= 1);
    // the empty-contact harmonic replacement is a competitor
    MinimizerResult h = minimize_alternating(p, f.data);
    CHECK(b.energy.total() <= h.energy.total() + 1e-12);
  }
}

TEST_CASE("brute force on finer grids: flagged interval scan") {
  Kernel k = fractional_laplacian_kernel(1, 0.5);
  Grid g(-2.0, 1.0, 300);
  Region om = Region::open_interval(g, -1.0, 0.0);
  OnePhaseProblem p(k, om, 1.0, step_data(g));
  MinimizerResult a = minimize_alternating(p);
  MinimizerResult b = minimize_bruteforce_1d(p);
  CHECK(!b.exhaustive);
  CHECK(std::abs(a.energy.total() - b.energy.total()) <= 1e-8);
}

TEST_CASE("fine fixture: Lemma 4.1 residual certificate") {
  const FineFixture& f = fine();
  OnePhaseProblem p(f.k, f.omega, f.M, f.data);
  ResidualCertificate c = residual_certificate(p, f.r);
  CHECK(c.min_u >= 0.0);
  CHECK(c.max_lu_omega <= 1e-6);
  CHECK(c.max_abs_lu_positivity <= 1e-6);
  // interior free boundary with a single transition
  CHECK(f.x0 > -0.75);
  CHECK(f.x0 < -0.25);
  CHECK(f.r.contact.parts().size() == 1);
  CHECK(f.r.positivity.parts().size() == 1);
  for (std::size_t i = 1; i < f.r.trace.size(); ++i)
    CHECK(f.r.trace[i] <= f.r.trace[i - 1] + 1e-12);
}

TEST_CASE("fine fixture: density, non-degeneracy, optimal regularity") {
  const FineFixture& f = fine();
  std::vector<double> radii;
  for (int j = 2; j <= 6; ++j) radii.push_back(std::pow(2.0, -j));
  auto dens = density_report(f.r, f.x0, radii);
  for (const auto& d : dens) {
    CHECK(d.resolved);
    CHECK(d.ratio > 0.05);
    CHECK(d.ratio < 0.95);
  }
  std::vector<double> ladder;
  for (int j = 2; j <= 8; ++j) ladder.push_back(std::pow(2.0, -j));
  auto nd = nondegeneracy_report(f.r, f.x0, ladder);
  CHECK(nd.kappa > 0.0);
  CHECK(nd.dist_coefficient > 0.0);
  ExponentFit fit = optimal_regularity_report(f.r, f.x0, ladder);
  CHECK(fit.valid);
  CHECK(std::abs(fit.exponent - 0.5) <= 0.05);
  CHECK(fit.r2 > 0.99);
}

TEST_CASE("density report: synthetic straight free boundary") {
  Grid g(-1.0, 1.0, 401);
  MinimizerResult r = synthetic_result(
      g, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; }, 0.5);
  std::vector<double> radii = {0.05, 0.1, 0.2, 0.4, 0.01};
  auto dens = density_report(r, 0.0, radii);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(dens[i].resolved);
    CHECK(std::abs(dens[i].ratio - 0.5) <= g.h() / dens[i].r);
  }
  CHECK(!dens[4].resolved);  // below 4h
}

TEST_CASE("non-degeneracy report: exact profile and the zero control") {
  Grid g(-1.0, 1.0, 401);
  MinimizerResult r = synthetic_result(
      g, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; }, 0.5);
  std::vector<double> radii = {0.1, 0.2, 0.4};  // grid-aligned
  auto nd = nondegeneracy_report(r, 0.0, radii);
  for (const auto& q : nd.sup_ratio)
    CHECK(q.second == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(nd.kappa == doctest::Approx(1.0).epsilon(1e-12));

  auto far = nondegeneracy_report(r, -0.5, {0.1, 0.2});
  CHECK(far.kappa == 0.0);  // u vanishes near x0: not a free boundary point
}

TEST_CASE("optimal regularity report: exact exponents and negative control") {
  Grid g(-1.0, 1.0, 401);
  std::vector<double> radii = {0.05, 0.1, 0.2, 0.4};
  for (double s : {0.3, 0.5, 0.7}) {
    MinimizerResult r = synthetic_result(
        g, [s](double x) { return x > 0.0 ? std::pow(x, s) : 0.0; }, s);
    ExponentFit fit = optimal_regularity_report(r, 0.0, radii);
    CHECK(fit.valid);
    CHECK(fit.exponent == doctest::Approx(s).epsilon(1e-10));
  }
  MinimizerResult r2 = synthetic_result(
      g, [](double x) { return x > 0.0 ? x : 0.0; }, 0.5);
  ExponentFit fit = optimal_regularity_report(r2, 0.0, radii);
  CHECK(fit.exponent == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(fit.exponent - r2.s) > 0.05);  // predicate correctly fails
}

TEST_CASE("Lemma 2.2: replacement energy bounded by the contact measure") {
  Kernel k = fractional_laplacian_kernel(1, 0.5);
  Grid g(-2.0, 1.0, 512);
  Region om = Region::open_interval(g, -1.0, 0.0);
  OnePhaseProblem p(k, om, 1.0, step_data(g));
  MinimizerResult mr = minimize_alternating(p);
  OperatorWeights w = make_weights(k, g);
  for (double rad : {0.1, 0.2, 0.4}) {
    Region B = Region::ball(g, -0.5, rad);
    GridFunction v = harmonic_replacement(w, mr.u, B);
    GridFunction d(g, mr.u.values() - v.values());
    QuadraticEnergy qB = make_energy(w, B, GridFunction::constant(g, 0.0));
    Eigen::VectorXd db(qB.idx.size());
    for (std::size_t a = 0; a < qB.idx.size(); ++a) db[a] = d[qB.idx[a]];
    int nz = 0;
    for (int i : B.indices())
      if (mr.u[i] == 0.0) ++nz;
    CHECK(qB.value(db) <= p.M * g.h() * nz + 1e-9);
  }
}

TEST_CASE("minimality against min/max competitors") {
  Kernel k = fractional_laplacian_kernel(1, 0.5);
  Grid g(-2.0, 1.0, 512);
  Region om = Region::open_interval(g, -1.0, 0.0);
  GridFunction data = step_data(g);
  OnePhaseProblem p(k, om, 1.0, data);
  MinimizerResult mr = minimize_alternating(p);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.5);
  for (int t = 0; t < 10; ++t) {
    GridFunction lo = data, hi = data;
    for (int i : om.indices()) {
      const double phi = U(rng);
      lo[i] = std::min(mr.u[i], phi);
      hi[i] = std::max(mr.u[i], phi);
    }
    const double gap = energy(p, lo).total() + energy(p, hi).total() -
                       2.0 * mr.energy.total();
    CHECK(gap >= -1e-9);
  }
}

TEST_CASE("min/max algebraic identity") {
  // worked instance: 2 = 10 - 8
  const double lhs = std::pow(std::max(3.0, 1.0) - std::max(0.0, 2.0), 2) +
                     std::pow(std::min(3.0, 1.0) - std::min(0.0, 2.0), 2);
  const double sq = std::pow(3.0 - 0.0, 2) + std::pow(1.0 - 2.0, 2);
  const double cross = 2.0 * std::max(3.0 - 1.0, 0.0) * std::max(-(0.0 - 2.0), 0.0);
  CHECK(lhs == 2.0);
  CHECK(sq == 10.0);
  CHECK(cross == 8.0);
  CHECK(minmax_identity_gap(3.0, 1.0, 0.0, 2.0) == 0.0);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  for (int t = 0; t < 10000; ++t) {
    const double w1 = U(rng), p1 = U(rng), w2 = U(rng), p2 = U(rng);
    CHECK(std::abs(minmax_identity_gap(w1, p1, w2, p2)) <= 1e-12);
    // the one-sided form under-counts: LHS <= RHS without the mirror term
    const double onesided =
        minmax_identity_gap(w1, p1, w2, p2) -
        2.0 * std::max(p1 - w1, 0.0) * std::max(w2 - p2, 0.0);
    CHECK(onesided <= 1e-12);
  }
}

TEST_CASE("Lemma 4.3: ball energy bound with a stable constant") {
  Kernel k = fractional_laplacian_kernel(1, 0.5);
  Grid g(-2.0, 1.0, 512);
  Region om = Region::open_interval(g, -1.0, 0.0);
  OnePhaseProblem p(k, om, 1.0, step_data(g));
  MinimizerResult mr = minimize_alternating(p);
  const auto& cp = mr.contact.parts().back();
  const double x0 = g.x(cp.end - 1) + 0.5 * g.h();
  double cmin = 1e300, cmax = 0.0;
  for (double R : {0.1, 0.2, 0.4}) {
    Region BR = Region::ball(g, x0, R);
    const double e = pair_energy(mr.u, k, BR, BR);
    double m2 = 0.0;
    for (int i : BR.indices()) m2 += mr.u[i] * mr.u[i];
    m2 /= BR.count();
    const double c = e / (R * (p.M + m2 / R));
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  CHECK(cmax < 1e3);
  CHECK(cmax / cmin < 5.0);
}

TEST_CASE("scaling covariance of the minimizer") {
  CoarseFixture f;
  const double M = 0.5, r = 0.5, s = 0.5;
  OnePhaseProblem p(f.k, f.omega, M, f.data);
  MinimizerResult base = minimize_alternating(p);
  const auto& cp = base.contact.parts().back();
  const double xb = f.g.x(cp.end - 1) + 0.5 * f.g.h();

  // lattice-aligned target (h_r = h / r) so the discretizations correspond
  Grid gr(-4.0, 2.0, 64);
  GridFunction datar = blow_up(f.data, s, 0.0, r, gr);
  Region omr = Region::open_interval(gr, -2.0, 0.0);
  OnePhaseProblem pr(rescale_kernel(f.k, r), omr, M, datar);
  MinimizerResult res = minimize_alternating(pr);
  REQUIRE(!res.contact.empty());
  const auto& cpr = res.contact.parts().back();
  const double xbr = gr.x(cpr.end - 1) + 0.5 * gr.h();
  CHECK(std::abs(xbr - xb / r) <= gr.h());
}

TEST_CASE("blow-up of the fine minimizer stabilizes") {
  const FineFixture& f = fine();
  Grid win(-1.0, 1.0, 257);
  GridFunction prev;
  std::vector<double> cauchy;
  for (int j = 1; j <= 4; ++j) {
    GridFunction b = blow_up(f.r.u, f.r.s, f.x0, std::pow(2.0, -j), win);
    CHECK(b.eval(-0.9) == 0.0);
    if (j > 1) {
      double d = 0.0;
      for (int i = 0; i < win.n; ++i)
        if (std::abs(win.x(i)) <= 0.5) d = std::max(d, std::abs(b[i] - prev[i]));
      cauchy.push_back(d);
    }
    prev = b;
  }
  CHECK(cauchy[1] < cauchy[0]);
  for (double d : cauchy) CHECK(d <= 0.1);

  // a re-minimized rescaling passes the residual certificate for the
  // rescaled kernel
  const double r = 0.25;
  GridFunction br = blow_up(f.r.u, f.r.s, f.x0, r, win);
  for (int i = 0; i < win.n; ++i) br[i] = std::max(br[i], 0.0);
  Region omr = Region::open_interval(win, -0.75, 0.75);
  OnePhaseProblem pr(rescale_kernel(f.k, r), omr, f.M, br);
  MinimizerResult rr = minimize_alternating(pr, br);
  ResidualCertificate c = residual_certificate(pr, rr);
  CHECK(c.min_u >= 0.0);
  CHECK(c.max_lu_omega <= 1e-6);
  CHECK(c.max_abs_lu_positivity <= 1e-6);
  double dd = 0.0;
  for (int i = 0; i < win.n; ++i)
    if (std::abs(win.x(i)) <= 0.5) dd = std::max(dd, std::abs(rr.u[i] - br[i]));
  CHECK(dd <= 0.1);
}

TEST_CASE("problem validation") {
  CoarseFixture f;
  CHECK_THROWS_AS(OnePhaseProblem(f.k, f.omega, 0.0, f.data),
                  std::invalid_argument);
  GridFunction bad = f.data;
  bad[3] = -0.5;
  CHECK_THROWS_AS(OnePhaseProblem(f.k, f.omega, 1.0, bad),
                  std::invalid_argument);
  CHECK_THROWS_AS(OnePhaseProblem(f.k, Region(), 1.0, f.data),
                  std::invalid_argument);
}
