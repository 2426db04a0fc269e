#include "nlfb/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace nlfb {

namespace {

GaussRule make_gauss(int n) {
  // Newton iteration on Legendre polynomials; standard Golub-Welsch-free
  // construction, good to machine precision for the sizes used here.
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[n - 1 - i] = r.weights[i];
  }
  return r;
}

}  // namespace

const GaussRule& gauss16() {
  static const GaussRule r = make_gauss(16);
  return r;
}

const GaussRule& gauss32() {
  static const GaussRule r = make_gauss(32);
  return r;
}

double gauss(const std::function<double(double)>& f, double a, double b,
             const GaussRule& rule) {
  const double mid = 0.5 * (a + b);
  const double hal = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(mid + hal * rule.nodes[i]);
  return acc * hal;
}

namespace {

double adaptive_rec(const std::function<double(double)>& f, double a, double b,
                    double whole, double tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gauss(f, a, mid);
  const double right = gauss(f, mid, b);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= tol * (1.0 + std::abs(left + right)))
    return left + right;
  return adaptive_rec(f, a, mid, left, 0.5 * tol, depth - 1) +
         adaptive_rec(f, mid, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive(const std::function<double(double)>& f, double a, double b,
                double tol, int max_depth) {
  if (a == b) return 0.0;
  return adaptive_rec(f, a, b, gauss(f, a, b), tol, max_depth);
}

double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  if (a == b) return 0.0;
  const double d = 0.5 * (b - a);
  const double pi_half = 0.5 * std::acos(-1.0);
  // Level-doubling trapezoid rule in the tanh-sinh variable.
  double h = 1.0;
  auto eval = [&](double t) -> double {
    const double u = pi_half * std::sinh(t);
    // distance to the nearer endpoint, computed stably:
    // 1 - tanh|u| = 2 e^{-2|u|} / (1 + e^{-2|u|})
    const double e = std::exp(-2.0 * std::abs(u));
    const double dist = d * 2.0 * e / (1.0 + e);
    if (dist <= 0.0) return 0.0;
    const double xa = t >= 0.0 ? b - dist : a + dist;
    if (xa <= std::min(a, b) || xa >= std::max(a, b)) return 0.0;
    // sech^2(u) = 4 e^{-2|u|} / (1 + e^{-2|u|})^2
    const double w =
        pi_half * std::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e));
    const double v = f(xa);
    return std::isfinite(v) ? v * w : 0.0;
  };
  double sum = eval(0.0);
  const double t_max = 6.5;
  for (double t = h; t < t_max; t += h) sum += eval(t) + eval(-t);
  double result = sum * h * d;
  for (int level = 0; level < 10; ++level) {
    h *= 0.5;
    double add = 0.0;
    for (double t = h; t < t_max; t += 2.0 * h) add += eval(t) + eval(-t);
    sum = sum + add;
    const double next = sum * h * d;
    if (level >= 2 &&
        std::abs(next - result) <= tol * (1.0 + std::abs(next))) {
      return next;
    }
    result = next;
  }
  return result;
}

double log_panels(const std::function<double(double)>& f, double t0,
                  const std::function<double(double)>& remainder_bound,
                  double tol, double ratio, int max_panels) {
  double acc = 0.0;
  double lo = t0;
  for (int p = 0; p < max_panels; ++p) {
    const double hi = lo * ratio;
    acc += gauss(f, lo, hi);
    lo = hi;
    if (remainder_bound(lo) <= tol) return acc;
  }
  throw std::runtime_error("log_panels: tail did not fall below tolerance");
}

double power_moment(double alpha, double a, double b) {
  if (std::abs(alpha + 1.0) < 1e-12) return std::log(b / a);
  return (std::pow(b, alpha + 1.0) - std::pow(a, alpha + 1.0)) / (alpha + 1.0);
}

double power_tail(double alpha, double a) {
  if (alpha >= -1.0)
    throw std::invalid_argument("power_tail: non-integrable exponent");
  return -std::pow(a, alpha + 1.0) / (alpha + 1.0);
}

}  // namespace nlfb
