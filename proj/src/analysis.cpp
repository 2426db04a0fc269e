#include "nlfb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nlfb {

ExponentFit fit_growth(const std::vector<std::pair<double, double>>& rv) {
  ExponentFit fit;
  std::vector<double> lx, ly;
  for (const auto& [r, v] : rv) {
    if (!(r > 0.0) || v == 0.0 || !std::isfinite(v)) {
      ++fit.dropped;
      continue;
    }
    lx.push_back(std::log(r));
    ly.push_back(std::log(std::abs(v)));
    fit.r_min = fit.samples == 0 ? r : std::min(fit.r_min, r);
    fit.r_max = std::max(fit.r_max, r);
    ++fit.samples;
  }
  if (fit.samples < 3) return fit;
  const int n = fit.samples;
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx <= 0.0) return fit;
  fit.exponent = sxy / sxx;
  fit.coefficient = std::exp(my - fit.exponent * mx);
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.valid = true;
  return fit;
}

ExponentFit fit_growth_at(const GridFunction& u, double x0,
                          const std::vector<double>& radii,
                          double center_value) {
  std::vector<std::pair<double, double>> rv;
  for (double r : radii) {
    const double v = std::max(std::abs(u.eval(x0 + r) - center_value),
                              std::abs(u.eval(x0 - r) - center_value));
    rv.push_back({r, v});
  }
  return fit_growth(rv);
}

double holder_seminorm(const GridFunction& u, const Region& A, double alpha,
                       Exec exec, std::uint64_t seed, std::size_t max_pairs) {
  const std::vector<int> idx = A.indices();
  const std::size_t m = idx.size();
  if (m < 2) return 0.0;
  const Grid& g = u.grid();
  const double h = g.h();
  const double ha = std::pow(h, alpha);
  auto quot = [&](int i, int j) {
    const int gap = std::abs(i - j);
    return std::abs(u[i] - u[j]) / (ha * std::pow(double(gap), alpha));
  };
  const std::size_t total = m * (m - 1) / 2;
  double best = 0.0;
  if (total <= max_pairs) {
    if (exec == Exec::Parallel) {
      double shared = 0.0;
#pragma omp parallel
      {
        double local = 0.0;
#pragma omp for schedule(dynamic, 16)
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = a + 1; b < m; ++b)
            local = std::max(local, quot(idx[a], idx[b]));
#pragma omp critical
        shared = std::max(shared, local);
      }
      best = shared;
    } else {
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
          best = std::max(best, quot(idx[a], idx[b]));
    }
    return best;
  }
  // stratified subsampling: dyadic classes of index gap, equal budget each
  int classes = 0;
  while ((std::size_t{1} << classes) < m) ++classes;
  const std::size_t per_class = max_pairs / std::max(classes, 1);
  std::mt19937_64 rng(seed);
  for (int c = 0; c < classes; ++c) {
    const std::size_t glo = std::size_t{1} << c;
    const std::size_t ghi = std::min(m - 1, (std::size_t{2} << c) - 1);
    if (glo > ghi) continue;
    std::uniform_int_distribution<std::size_t> pick_a(0, m - 1);
    std::uniform_int_distribution<std::size_t> pick_g(glo, ghi);
    for (std::size_t t = 0; t < per_class; ++t) {
      const std::size_t gap = pick_g(rng);
      std::size_t a = pick_a(rng);
      std::size_t b;
      if (a + gap < m) {
        b = a + gap;
      } else if (a >= gap) {
        b = a - gap;
      } else {
        a = 0;
        b = gap;
      }
      best = std::max(best, quot(idx[a], idx[b]));
    }
  }
  // always include adjacent pairs: they dominate for rough functions
  for (std::size_t a = 0; a + 1 < m; ++a)
    best = std::max(best, quot(idx[a], idx[a + 1]));
  return best;
}

}  // namespace nlfb
