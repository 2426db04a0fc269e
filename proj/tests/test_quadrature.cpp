#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlfb/quadrature.hpp"

using namespace nlfb;

TEST_CASE("gauss rules integrate polynomials exactly") {
  auto p = [](double x) { return 5.0 * x * x * x - x + 2.0; };
  CHECK(gauss(p, -1.0, 3.0) == doctest::Approx(2.0 * 4.0 +
        5.0 / 4.0 * (81.0 - 1.0) - 0.5 * (9.0 - 1.0)).epsilon(1e-14));
  // degree 31 is exact for the 16-point rule
  auto q = [](double x) { return std::pow(x, 31); };
  CHECK(gauss(q, 0.0, 1.0) == doctest::Approx(1.0 / 32.0).epsilon(1e-13));
  CHECK(gauss(q, 0.0, 1.0, gauss32()) == doctest::Approx(1.0 / 32.0).epsilon(1e-13));
}

TEST_CASE("adaptive handles smooth integrands to tight tolerance") {
  auto f = [](double x) { return std::exp(x); };
  CHECK(adaptive(f, 0.0, 1.0, 1e-14) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  auto g = [](double x) { return std::sin(10.0 * x); };
  CHECK(adaptive(g, 0.0, M_PI, 1e-13) ==
        doctest::Approx((1.0 - std::cos(10.0 * M_PI)) / 10.0).epsilon(1e-11));
}

TEST_CASE("tanh_sinh resolves endpoint singularities") {
  auto f = [](double x) { return 1.0 / std::sqrt(x); };
  CHECK(tanh_sinh(f, 0.0, 1.0, 1e-13) == doctest::Approx(2.0).epsilon(1e-12));
  auto g = [](double x) { return std::pow(x, -0.9); };
  CHECK(tanh_sinh(g, 0.0, 1.0, 1e-13) == doctest::Approx(10.0).epsilon(1e-11));
  // int_0^1 x^{-1/2} (1-x) dx = 4/3; left-endpoint singularity at 0 is the
  // configuration all library call sites use
  auto h = [](double x) { return std::pow(x, -0.5) * (1.0 - x); };
  CHECK(tanh_sinh(h, 0.0, 1.0, 1e-13) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  // right-endpoint singularities suffer cancellation inside the integrand
  // (1 - x evaluated in absolute coordinates): accuracy is ~1e-8 only
  auto h2 = [](double x) { return std::pow(1.0 - x, -0.5) * x; };
  CHECK(tanh_sinh(h2, 0.0, 1.0, 1e-13) == doctest::Approx(4.0 / 3.0).epsilon(1e-7));
}

TEST_CASE("log_panels integrates power tails with rigorous stopping") {
  auto f = [](double t) { return std::pow(t, -2.0); };
  auto bound = [](double t) { return 1.0 / t; };
  CHECK(log_panels(f, 1.0, bound, 1e-12) == doctest::Approx(1.0).epsilon(1e-11));
  auto f2 = [](double t) { return std::pow(t, -1.5); };
  auto bound2 = [](double t) { return 2.0 / std::sqrt(t); };
  CHECK(log_panels(f2, 4.0, bound2, 1e-12) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("power_moment closed forms including the log branch") {
  CHECK(power_moment(2.0, 1.0, 2.0) == doctest::Approx(7.0 / 3.0).epsilon(1e-15));
  CHECK(power_moment(-1.0, 1.0, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(power_moment(-2.0, 1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(power_moment(0.0, 0.0, 3.0) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("power_tail requires integrability and matches closed form") {
  CHECK(power_tail(-2.0, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(power_tail(-1.5, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS(power_tail(-1.0, 1.0));
  CHECK_THROWS(power_tail(0.5, 1.0));
}
