#include "nlfb/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "nlfb/quadrature.hpp"

namespace nlfb {

std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::FractionalLaplacian: return "fractional-laplacian";
    case KernelFamily::PowerEnvelopeOscillating:
      return "power-envelope-oscillating";
    case KernelFamily::DyadicPiecewise: return "dyadic-piecewise";
    case KernelFamily::Custom: return "custom";
  }
  return "?";
}

Kernel::Kernel(int dim, double s, double lam, double Lam, KernelFamily family,
               std::function<double(double)> envelope)
    : dim_(dim), s_(s), lam_(lam), Lam_(Lam), family_(family),
      env_(std::move(envelope)) {
  if (dim < 1) throw std::invalid_argument("kernel: dimension must be >= 1");
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("kernel: order s must lie in (0,1)");
  if (!(lam > 0.0 && Lam >= lam))
    throw std::invalid_argument("kernel: need 0 < lam <= Lam");
  power_ = (lam == Lam) && family != KernelFamily::Custom;
}

double Kernel::density(double r) const {
  return env_(r) * std::pow(r, -(dim_ + 2.0 * s_));
}

double frac_laplacian_constant(int n, double s) {
  return std::pow(4.0, s) * std::tgamma(0.5 * n + s) /
         (std::pow(std::acos(-1.0), 0.5 * n) *
          std::abs(std::tgamma(-s)));
}

Kernel fractional_laplacian_kernel(int n, double s) {
  const double c = 0.5 * frac_laplacian_constant(n, s);
  return Kernel(n, s, c, c, KernelFamily::FractionalLaplacian,
                [c](double) { return c; });
}

Kernel oscillating_kernel(int n, double s, double lam, double Lam,
                          double log_frequency) {
  auto env = [lam, Lam, log_frequency](double r) {
    return lam + (Lam - lam) * 0.5 * (1.0 + std::sin(log_frequency * std::log(r)));
  };
  if (Lam == lam) {
    // Zero oscillation amplitude: a constant multiple of the power kernel.
    return Kernel(n, s, lam, Lam, KernelFamily::PowerEnvelopeOscillating,
                  [lam](double) { return lam; });
  }
  return Kernel(n, s, lam, Lam, KernelFamily::PowerEnvelopeOscillating, env);
}

Kernel dyadic_kernel(int n, double s, double lam, double Lam) {
  auto env = [lam, Lam](double r) {
    const long long k = static_cast<long long>(std::floor(std::log2(r)));
    return (k % 2 == 0) ? lam : Lam;
  };
  return Kernel(n, s, lam, Lam, KernelFamily::DyadicPiecewise, env);
}

Kernel custom_kernel(int n, double s, double lam, double Lam,
                     std::function<double(double)> envelope) {
  return Kernel(n, s, lam, Lam, KernelFamily::Custom, std::move(envelope));
}

Kernel rescale_kernel(const Kernel& k, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("rescale_kernel: r must be > 0");
  if (k.is_power()) return k;  // homogeneous kernels are scale invariant
  auto parent = k;
  return Kernel(k.dim(), k.s(), k.lam(), k.Lam(), k.family(),
                [parent, r](double t) { return parent.envelope(r * t); });
}

double reduction_constant(int n, double s, double tol) {
  if (n != 2)
    throw std::invalid_argument("reduction_constant: only n = 2 supported");
  // int_R (1+u^2)^{-(n+2s)/2} du with u = tan(theta):
  // int_{-pi/2}^{pi/2} cos(theta)^{n-2+2s} dtheta.
  const double p = n - 2 + 2.0 * s;
  const double pi_half = 0.5 * std::acos(-1.0);
  return tanh_sinh(
      [p](double th) { return std::pow(std::cos(th), p); }, -pi_half, pi_half,
      tol);
}

Kernel reduce_to_1d(const Kernel& k, double tol) {
  if (k.dim() < 2)
    throw std::invalid_argument("reduce_to_1d: kernel must have dimension >= 2");
  if (k.dim() != 2)
    throw std::invalid_argument("reduce_to_1d: only n = 2 supported");
  const double c0 = reduction_constant(2, k.s(), tol);
  if (k.is_power()) {
    const double c = c0 * k.lam();
    return Kernel(1, k.s(), c, c, k.family(), [c](double) { return c; });
  }
  auto parent = k;
  const double s = k.s();
  const double pi_half = 0.5 * std::acos(-1.0);
  auto env1 = [parent, s, pi_half, tol](double t) {
    return tanh_sinh(
        [&](double th) {
          const double c = std::cos(th);
          return std::pow(c, 2.0 * s) * parent.envelope(t / c);
        },
        -pi_half, pi_half, tol);
  };
  return Kernel(1, k.s(), c0 * k.lam(), c0 * k.Lam(), k.family(), env1);
}

}  // namespace nlfb
