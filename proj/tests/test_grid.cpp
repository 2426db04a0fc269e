#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlfb/grid.hpp"
#include "nlfb/meshops.hpp"

using namespace nlfb;

TEST_CASE("grid basics and validation") {
  Grid g(-1.0, 1.0, 201);
  CHECK(g.h() == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(g.x(0) == -1.0);
  CHECK(g.x(200) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.nearest(0.0) == 100);
  CHECK(g.nearest(-5.0) == 0);
  CHECK(g.nearest(5.0) == 200);
  CHECK(g.contains(0.3));
  CHECK(!g.contains(1.5));
  CHECK_THROWS(Grid(1.0, -1.0, 100));
  CHECK_THROWS(Grid(0.0, 1.0, 4));
}

TEST_CASE("exterior descriptors evaluate and validate") {
  CHECK(ExteriorSide::zero().eval(10.0) == 0.0);
  CHECK(ExteriorSide::constant(3.0).eval(10.0) == 3.0);
  CHECK(ExteriorSide::power(2.0, 0.5).eval(4.0) == doctest::Approx(4.0));
  auto s = ExteriorSide::sampled({1.0, 2.0, 4.0}, {1.0, 3.0, 5.0}, 5.0 / 4.0, 1.0);
  CHECK(s.eval(1.5) == doctest::Approx(2.0));  // linear interpolation
  CHECK(s.eval(8.0) == doctest::Approx(10.0)); // power tail beyond R_max
  CHECK(s.growth_exponent() == doctest::Approx(1.0));

  CHECK_NOTHROW(validate_exterior(ExteriorSide::power(1.0, 0.3), 0.25));
  CHECK_THROWS(validate_exterior(ExteriorSide::power(1.0, 0.6), 0.25));
  CHECK_NOTHROW(validate_exterior(ExteriorSide::constant(7.0), 0.1));
}

TEST_CASE("grid function evaluation: interior pl, exterior descriptor") {
  Grid g(-1.0, 1.0, 101);
  GridFunction u = GridFunction::sample(
      g, [](double x) { return x * x; }, ExteriorSide::constant(1.0),
      ExteriorSide::power(1.0, 0.25));
  CHECK(u.eval(0.0) == doctest::Approx(0.0));
  CHECK(u.eval(0.5) == doctest::Approx(0.25).epsilon(1e-12));
  // midpoint of a cell: linear interpolation, not x^2
  const double mid = g.x(50) + 0.5 * g.h();
  CHECK(u.eval(mid) == doctest::Approx(0.5 * (u[50] + u[51])).epsilon(1e-14));
  CHECK(u.eval(-2.0) == 1.0);
  CHECK(u.eval(16.0) == doctest::Approx(2.0));
  // virtual lattice nodes agree with eval at the lattice coordinate
  CHECK(u.node(150) == doctest::Approx(u.eval(g.x(0) + 150 * g.h())).epsilon(1e-12));
  CHECK(u.node(-30) == 1.0);
  CHECK(u.node(70) == u[70]);
}

TEST_CASE("regions: construction and set algebra") {
  Grid g(0.0, 1.0, 11);
  Region r = Region::open_interval(g, 0.25, 0.75);  // nodes 3..7
  CHECK(r.count() == 5);
  CHECK(r.contains(3));
  CHECK(r.contains(7));
  CHECK(!r.contains(2));

  Region b = Region::ball(g, 0.5, 0.2);  // nodes 3..7 closed
  CHECK(b.count() == 5);

  Region c = r.complement(11);
  CHECK(c.count() == 6);
  CHECK(c.contains(0));
  CHECK(!c.contains(5));

  Region i = r.intersect(Region::interval(0, 5));
  CHECK(i.count() == 2);  // nodes 3, 4

  std::vector<bool> mask(11, false);
  mask[1] = mask[2] = mask[9] = true;
  Region m = Region::from_mask(mask);
  CHECK(m.parts().size() == 2);
  CHECK(m.count() == 3);
  auto idx = m.indices();
  CHECK(idx == std::vector<int>({1, 2, 9}));
}

TEST_CASE("tail functional closed forms") {
  Grid g(-1.0, 1.0, 401);
  GridFunction zero = GridFunction::constant(g, 0.0);
  CHECK(tail(zero, 0.5, 0.5, 0.0) == 0.0);

  // u === 1: tail = 1/s, independent of R and x0
  for (double s : {0.2, 0.35, 0.5, 0.65, 0.8}) {
    GridFunction one(g, Eigen::VectorXd::Ones(g.n), ExteriorSide::constant(1.0),
                     ExteriorSide::constant(1.0));
    CHECK(tail(one, s, 0.5, 0.0) == doctest::Approx(1.0 / s).epsilon(1e-6));
    CHECK(tail(one, s, 0.3, 0.2) == doctest::Approx(1.0 / s).epsilon(1e-6));
  }

  // u = |x|^s, s = 1/2, R = 1, x0 = 0: 2 int_1^inf t^{-3/2} dt * ... = 4
  const double s = 0.5;
  GridFunction u = GridFunction::sample(
      g, [s](double x) { return std::pow(std::abs(x), s); },
      ExteriorSide::power(1.0, s), ExteriorSide::power(1.0, s));
  CHECK(tail(u, s, 1.0, 0.0) == doctest::Approx(4.0).epsilon(1e-8));

  // divergent growth rejected
  GridFunction bad(g, Eigen::VectorXd::Zero(g.n), ExteriorSide::zero(),
                   ExteriorSide::power(1.0, 0.9));
  CHECK_THROWS(tail(bad, 0.35, 0.5, 0.0));
}

TEST_CASE("blow_up identity, homogeneity, algebra") {
  const double s = 0.5;
  Grid g(-2.0, 2.0, 801);
  GridFunction u = GridFunction::sample(
      g, [s](double x) { return x > 0.0 ? std::pow(x, s) : 0.0; },
      ExteriorSide::zero(), ExteriorSide::power(1.0, s));

  GridFunction id = blow_up(u, s, 0.0, 1.0, g);
  for (int i = 0; i < g.n; ++i)
    CHECK(id[i] == doctest::Approx(u[i]).epsilon(1e-13));

  // s-homogeneity: u(rx)/r^s = u(x)
  for (double r : {0.5, 2.0, 4.0}) {
    Grid t(-1.0, 1.0, 201);
    if (r * 1.0 > 2.0) t = Grid(-0.5, 0.5, 201);
    GridFunction v = blow_up(u, s, 0.0, r, t);
    for (int i = 0; i < t.n; ++i) {
      const double x = t.x(i);
      const double exact = x > 0.0 ? std::pow(x, s) : 0.0;
      CHECK(v[i] == doctest::Approx(exact).epsilon(1e-10).scale(1.0));
    }
  }

  // u = x_+^{1+s}, r = 1/2: blow-up is (1/2) x_+^{3/2} on the window
  GridFunction w = GridFunction::sample(
      g, [s](double x) { return x > 0.0 ? std::pow(x, 1.0 + s) : 0.0; },
      ExteriorSide::zero(), ExteriorSide::power(1.0, 1.0 + s));
  Grid t(-1.0, 1.0, 201);
  GridFunction wb = blow_up(w, s, 0.0, 0.5, t);
  for (int i = 0; i < t.n; ++i) {
    const double x = t.x(i);
    const double exact = x > 0.0 ? 0.5 * std::pow(x, 1.5) : 0.0;
    CHECK(wb[i] == doctest::Approx(exact).epsilon(1e-9).scale(1.0));
  }

  // composition within O(h^2)
  Grid mid(-1.0, 1.0, 401);
  GridFunction smooth = GridFunction::sample(
      g, [](double x) { return std::cos(x); }, ExteriorSide::constant(1.0),
      ExteriorSide::constant(1.0));
  GridFunction once = blow_up(blow_up(smooth, s, 0.3, 0.5, mid), s, 0.0, 0.5, mid);
  GridFunction direct = blow_up(smooth, s, 0.3, 0.25, mid);
  for (int i = 0; i < mid.n; ++i)
    CHECK(once[i] == doctest::Approx(direct[i]).epsilon(5e-5));
}
