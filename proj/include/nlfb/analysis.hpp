#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nlfb/grid.hpp"
#include "nlfb/nonlocal.hpp"

namespace nlfb {

/// Least-squares fit of log|v| against log r. Samples with v == 0 or r <= 0
/// are dropped (counted in `dropped`); the fit is valid once at least three
/// samples survive.
struct ExponentFit {
  double exponent = 0.0;     // slope beta
  double coefficient = 0.0;  // exp(intercept)
  double r2 = 0.0;           // coefficient of determination in log-log space
  double r_min = 0.0;
  double r_max = 0.0;
  int samples = 0;
  int dropped = 0;
  bool valid = false;
};

ExponentFit fit_growth(const std::vector<std::pair<double, double>>& rv);

/// Convenience: fit |u(x) - u(x0)| (or |u| when center_value is given)
/// against |x - x0| at the given radii, evaluating u by interpolation.
ExponentFit fit_growth_at(const GridFunction& u, double x0,
                          const std::vector<double>& radii,
                          double center_value = 0.0);

/// sup over node pairs in A of |u_i - u_j| / |x_i - x_j|^alpha. Exhaustive
/// when the pair count is below max_pairs; otherwise pairs are subsampled
/// deterministically (seeded), stratified over dyadic distance classes so
/// that both near and far pairs are represented.
double holder_seminorm(const GridFunction& u, const Region& A, double alpha,
                       Exec exec = Exec::Parallel, std::uint64_t seed = 1234,
                       std::size_t max_pairs = 2'000'000);

}  // namespace nlfb
