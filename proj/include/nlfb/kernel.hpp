#pragma once

#include <functional>
#include <memory>
#include <string>

namespace nlfb {

/// Kernel families built into the lab. All kernels here are radial:
/// K(h) = envelope(|h|) * |h|^(-n-2s) with envelope values in [lam, Lam].
enum class KernelFamily {
  FractionalLaplacian,
  PowerEnvelopeOscillating,
  DyadicPiecewise,
  Custom,
};

std::string to_string(KernelFamily f);

/// A symmetric jump kernel with ellipticity envelope. Immutable after
/// construction and safe to share across threads; all member calls are pure.
///
/// The density feeds the operator
///   Lu(x) = 2 p.v. int (u(x) - u(x+h)) K(h) dh
/// verbatim; matching the fractional Laplacian therefore puts c_{n,s}/2
/// into the density (see fractional_laplacian_kernel). Evaluation at h = 0
/// is undefined by contract: the singular cell is handled centrally by the
/// moment code in nonlocal.hpp.
class Kernel {
 public:
  Kernel(int dim, double s, double lam, double Lam, KernelFamily family,
         std::function<double(double)> envelope);

  int dim() const { return dim_; }
  double s() const { return s_; }
  double lam() const { return lam_; }
  double Lam() const { return Lam_; }
  KernelFamily family() const { return family_; }

  /// K(h) * |h|^(n+2s), a value in [lam, Lam]. r > 0.
  double envelope(double r) const { return env_(r); }

  /// K as a function of |h|. r > 0.
  double density(double r) const;

  /// True when lam == Lam and the envelope is exactly constant (power
  /// kernel); enables closed-form moments.
  bool is_power() const { return power_; }

 private:
  int dim_;
  double s_, lam_, Lam_;
  KernelFamily family_;
  std::function<double(double)> env_;
  bool power_ = false;
};

/// Normalization constant c_{n,s} = 4^s Gamma(n/2+s) / (pi^{n/2} |Gamma(-s)|)
/// of the fractional Laplacian. For n = 1, s = 1/2 this equals 1/pi.
double frac_laplacian_constant(int n, double s);

/// K(h) = (c_{n,s}/2) |h|^{-n-2s}; with the factor-2 operator convention
/// above, L equals (-Delta)^s. Rejects s outside (0,1) or n < 1.
Kernel fractional_laplacian_kernel(int n, double s);

/// K(h) = |h|^{-n-2s} (lam + (Lam-lam) (1 + sin(freq log|h|)) / 2).
Kernel oscillating_kernel(int n, double s, double lam, double Lam,
                          double log_frequency);

/// Envelope jumping between lam and Lam on dyadic annuli:
/// lam when floor(log2 |h|) is even, Lam otherwise.
Kernel dyadic_kernel(int n, double s, double lam, double Lam);

/// User-supplied radial envelope, clamped validation only at call sites.
Kernel custom_kernel(int n, double s, double lam, double Lam,
                     std::function<double(double)> envelope);

/// K_r(h) = r^{n+2s} K(rh); same lam, Lam, s. For a radial kernel this is
/// just an envelope reparameterization env_r(t) = env(r t).
Kernel rescale_kernel(const Kernel& k, double r);

/// The 1D kernel of the hyperplane-integrated n-dimensional kernel,
///   Ktilde(t) = int_{R^{n-1}} K(h' + t e) dh'.
/// Only n = 2 is supported. For radial kernels the direction is immaterial;
/// the resulting envelope is
///   env1(t) = int_{-pi/2}^{pi/2} cos(theta)^{2s} env(t / cos(theta)) dtheta,
/// so lam1 = c0 lam and Lam1 = c0 Lam with c0 = int cos^{2s}.
/// tol controls the per-evaluation quadrature tolerance.
Kernel reduce_to_1d(const Kernel& k, double tol = 1e-10);

/// c0 = int_{R^{n-1}} (|h'|^2 + 1)^{-(n+2s)/2} dh' for n = 2, computed by
/// quadrature (equals 2 exactly for s = 1/2).
double reduction_constant(int n, double s, double tol = 1e-12);

}  // namespace nlfb
