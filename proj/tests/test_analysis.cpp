#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlfb/analysis.hpp"

using namespace nlfb;

namespace {

std::vector<std::pair<double, double>> ladder(
    const std::function<double(double)>& f, int count = 12) {
  std::vector<std::pair<double, double>> rv;
  for (int i = 0; i < count; ++i) {
    const double r = std::pow(2.0, -i / 2.0);
    rv.push_back({r, f(r)});
  }
  return rv;
}

}  // namespace

TEST_CASE("fit_growth recovers exact power laws") {
  auto f1 = ladder([](double r) { return std::pow(r, 0.5); });
  ExponentFit a = fit_growth(f1);
  CHECK(a.valid);
  CHECK(a.exponent == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a.coefficient == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.r2 == doctest::Approx(1.0).epsilon(1e-12));

  auto f2 = ladder([](double r) { return 3.0 * std::pow(r, 1.5); });
  ExponentFit b = fit_growth(f2);
  CHECK(b.exponent == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(b.coefficient == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("fit_growth: perturbed power law stays near the exponent") {
  const double s = 0.6;
  auto f = ladder([s](double r) {
    return std::pow(r, s) * (1.0 + 0.1 * std::sin(std::log(r)));
  }, 24);
  ExponentFit fit = fit_growth(f);
  CHECK(fit.valid);
  CHECK(std::abs(fit.exponent - s) <= 0.03);
  CHECK(fit.r2 < 1.0);
  CHECK(fit.r2 > 0.9);
}

TEST_CASE("fit_growth drops zeros and reports invalid for tiny samples") {
  std::vector<std::pair<double, double>> rv = {
      {1.0, 1.0}, {0.5, 0.0}, {0.25, 0.0}};
  ExponentFit fit = fit_growth(rv);
  CHECK(!fit.valid);
  CHECK(fit.dropped == 2);
  CHECK(fit.samples == 1);
}

TEST_CASE("fit_growth scale covariance") {
  auto base = ladder([](double r) { return 2.0 * std::pow(r, 0.75); });
  ExponentFit f0 = fit_growth(base);
  auto scaled = base;
  for (auto& p : scaled) p.second *= 7.0;
  ExponentFit f1 = fit_growth(scaled);
  // scale covariance up to log-rounding (log(7v) != log 7 + log v exactly)
  CHECK(f1.exponent == doctest::Approx(f0.exponent).epsilon(1e-13));
  CHECK(f1.coefficient == doctest::Approx(7.0 * f0.coefficient).epsilon(1e-12));
}

TEST_CASE("holder_seminorm exact cases") {
  Grid g(0.0, 1.0, 101);
  Region all = Region::interval(0, g.n);

  GridFunction c = GridFunction::constant(g, 2.0);
  CHECK(holder_seminorm(c, all, 0.5) == 0.0);

  GridFunction u = GridFunction::sample(g, [](double x) { return x; });
  CHECK(holder_seminorm(u, all, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // alpha = 0.5: sup |x-y| / |x-y|^{1/2} = 1 at the full span
  CHECK(holder_seminorm(u, all, 0.5) == doctest::Approx(1.0).epsilon(1e-12));

  Grid g2(-1.0, 1.0, 201);
  GridFunction r = GridFunction::sample(
      g2, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
  Region all2 = Region::interval(0, g2.n);
  CHECK(holder_seminorm(r, all2, 0.5) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("holder_seminorm subsampling is deterministic and bounded") {
  Grid g(0.0, 1.0, 2001);
  GridFunction u = GridFunction::sample(
      g, [](double x) { return std::sin(20.0 * x); });
  Region all = Region::interval(0, g.n);
  const double exact = holder_seminorm(u, all, 0.5, Exec::Serial, 1, 1u << 31);
  const double sub1 = holder_seminorm(u, all, 0.5, Exec::Serial, 99, 20000);
  const double sub2 = holder_seminorm(u, all, 0.5, Exec::Serial, 99, 20000);
  CHECK(sub1 == sub2);
  CHECK(sub1 <= exact + 1e-14);
  CHECK(sub1 >= 0.5 * exact);  // stratified sampling stays representative
  const double par = holder_seminorm(u, all, 0.5, Exec::Parallel, 1, 1u << 31);
  CHECK(par == exact);
}
