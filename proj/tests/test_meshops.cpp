#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlfb/meshops.hpp"

using namespace nlfb;

TEST_CASE("hs_seminorm: constants vanish") {
  Grid g(-1.0, 1.0, 101);
  GridFunction u = GridFunction::constant(g, 3.0);
  Region all = Region::interval(0, g.n);
  CHECK(hs_seminorm(u, 0.5, all, all) == 0.0);
}

TEST_CASE("hs_seminorm: u = x on (0,1), s = 1/4 matches the closed form") {
  // iint_{(0,1)^2} |x-y|^{1/2} dx dy = 8/15
  Grid g(0.0, 1.0, 201);
  GridFunction u = GridFunction::sample(g, [](double x) { return x; });
  Region all = Region::interval(0, g.n);
  const double v = hs_seminorm(u, 0.25, all, all);
  CHECK(v * v == doctest::Approx(8.0 / 15.0).epsilon(1e-8));
}

TEST_CASE("hs_seminorm is symmetric in its regions, bitwise") {
  Grid g(-1.0, 1.0, 129);
  GridFunction u = GridFunction::sample(
      g, [](double x) { return std::sin(2.0 * x) + 0.3 * x; });
  Region a = Region::open_interval(g, -1.0, -0.2);
  Region b = Region::open_interval(g, 0.1, 0.9);
  const double ab = hs_seminorm(u, 0.4, a, b, Exec::Serial);
  const double ba = hs_seminorm(u, 0.4, b, a, Exec::Serial);
  CHECK(ab == ba);
  CHECK(ab > 0.0);
}

TEST_CASE("hs_seminorm flags the divergent half-line indicator for s >= 1/2") {
  Grid g(-1.0, 1.0, 257);
  GridFunction u = GridFunction::sample(
      g, [](double x) { return x > 0.0 ? 1.0 : 0.0; }, ExteriorSide::zero(),
      ExteriorSide::constant(1.0));
  Region all = Region::interval(0, g.n);
  CHECK(std::isinf(hs_seminorm(u, 0.5, all, all)));
  CHECK(std::isinf(hs_seminorm(u, 0.7, all, all)));
  // integrable for small s
  CHECK(std::isfinite(hs_seminorm(u, 0.25, all, all)));
}

TEST_CASE("pair_energy against the power kernel equals the squared seminorm") {
  Grid g(-1.0, 1.0, 101);
  GridFunction u = GridFunction::sample(
      g, [](double x) { return x * x; });
  Region a = Region::open_interval(g, -0.9, 0.0);
  Region b = Region::open_interval(g, 0.0, 0.9);
  const double s = 0.3;
  Kernel k = custom_kernel(1, s, 1.0, 1.0, [](double) { return 1.0; });
  const double e = pair_energy(u, k, a, b);
  const double v = hs_seminorm(u, s, a, b);
  CHECK(e == doctest::Approx(v * v).epsilon(1e-12));
}

TEST_CASE("pair_energy: serial equals parallel") {
  Grid g(-1.0, 1.0, 101);
  GridFunction u = GridFunction::sample(
      g, [](double x) { return std::cos(4.0 * x); });
  Region all = Region::interval(0, g.n);
  Kernel k = oscillating_kernel(1, 0.45, 1.0, 2.0, 3.0);
  const double es = pair_energy(u, k, all, all, Exec::Serial);
  const double ep = pair_energy(u, k, all, all, Exec::Parallel);
  CHECK(es == doctest::Approx(ep).epsilon(1e-14));
}
