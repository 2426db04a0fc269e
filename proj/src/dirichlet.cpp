#include "nlfb/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlfb {

GridFunction solve_dirichlet(const OperatorWeights& w, const Region& omega,
                             const GridFunction& f, const GridFunction& g,
                             Exec exec) {
  const int n = w.grid.n;
  const std::vector<int> idx = omega.indices();
  const int m = static_cast<int>(idx.size());
  if (m == 0) return g;
  std::vector<char> in(n, 0);
  for (int i : idx) in[i] = 1;

  Eigen::MatrixXd A(m, m);
  Eigen::VectorXd rhs(m);
  const double diag = w.diag();
  auto fill_row = [&](int a) {
    const int i = idx[a];
    for (int b = 0; b < m; ++b)
      A(a, b) = (a == b) ? diag : -2.0 * w.gamma[std::abs(i - idx[b])];
    double r = f[i] + exterior_term(w, g, i);
    for (int j = 0; j < n; ++j)
      if (!in[j] && j != i) r += 2.0 * w.gamma[std::abs(i - j)] * g[j];
    rhs[a] = r;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int a = 0; a < m; ++a) fill_row(a);
  } else {
    for (int a = 0; a < m; ++a) fill_row(a);
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("solve_dirichlet: factorization failed "
                             "(assembly invariant violated)");
  Eigen::VectorXd sol = ldlt.solve(rhs);

  GridFunction u = g;
  for (int a = 0; a < m; ++a) u[idx[a]] = sol[a];
  return u;
}

GridFunction solve_dirichlet(const Kernel& k, const Region& omega,
                             const GridFunction& f, const GridFunction& g,
                             Exec exec) {
  OperatorWeights w = make_weights(k, f.grid());
  return solve_dirichlet(w, omega, f, g, exec);
}

GridFunction harmonic_replacement(const OperatorWeights& w,
                                  const GridFunction& u, const Region& B,
                                  Exec exec) {
  GridFunction zero = GridFunction::constant(w.grid, 0.0);
  return solve_dirichlet(w, B, zero, u, exec);
}

double project_on_barrier(const GridFunction& u, const GridFunction& b,
                          double z, double r) {
  const Grid& g = u.grid();
  const double lo = std::max(g.min, z - r);
  const double hi = std::min(g.max, z + r);
  if (hi <= lo)
    throw std::invalid_argument("project_on_barrier: ball misses the window");
  double num = 0.0, den = 0.0;
  auto accumulate = [&](double a, double bb) {
    const int sub = 4;
    const double dh = (bb - a) / sub;
    for (int m = 0; m < sub; ++m) {
      const double y0 = a + m * dh, y1 = y0 + dh;
      const double u0 = u.eval(y0), u1 = u.eval(y1);
      const double b0 = b.eval(y0), b1 = b.eval(y1);
      num += 0.5 * dh * (u0 * b0 + u1 * b1);
      den += 0.5 * dh * (b0 * b0 + b1 * b1);
    }
  };
  for (int i = 0; i + 1 < g.n; ++i) {
    const double a = std::max(lo, g.x(i));
    const double bb = std::min(hi, g.x(i + 1));
    if (bb > a) accumulate(a, bb);
  }
  if (den < 1e-14)
    throw std::invalid_argument("project_on_barrier: barrier vanishes on the ball");
  return num / den;
}

double boundary_distance(const Grid& g, const Region& omega, int i) {
  const double h = g.h();
  const double x = g.x(i);
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : omega.parts()) {
    const double left = g.x(p.begin) - 0.5 * h;
    const double right = g.x(p.end - 1) + 0.5 * h;
    if (i >= p.begin && i < p.end)
      d = std::min({d, x - left, right - x});
  }
  return d;
}

ExponentFit hopf_check(const GridFunction& u, const Region& omega, double s) {
  const Grid& g = u.grid();
  const double h = g.h();
  double diam = 0.0;
  for (const auto& p : omega.parts())
    diam = std::max(diam, g.x(p.end - 1) - g.x(p.begin) + h);
  const double d_min = 4.0 * h;
  const double d_max = 0.25 * diam;

  ExponentFit degenerate;  // valid = false
  if (d_max <= d_min) return degenerate;

  // dyadic bands [d_min 2^j, d_min 2^{j+1})
  struct Band {
    double d = 0.0;
    double umin = std::numeric_limits<double>::infinity();
  };
  const int nbands =
      std::max(1, static_cast<int>(std::floor(std::log2(d_max / d_min))));
  std::vector<Band> bands(nbands);
  double inf_coeff = std::numeric_limits<double>::infinity();
  for (int i : omega.indices()) {
    const double d = boundary_distance(g, omega, i);
    if (u[i] <= 0.0 && d >= d_min) return degenerate;  // Hopf dichotomy: u == 0 branch
    if (d < d_min || d >= d_max) continue;
    const int j = std::min(nbands - 1,
                           static_cast<int>(std::floor(std::log2(d / d_min))));
    if (u[i] < bands[j].umin) {
      bands[j].umin = u[i];
      bands[j].d = d;
    }
    inf_coeff = std::min(inf_coeff, u[i] / std::pow(d, s));
  }
  std::vector<std::pair<double, double>> rv;
  for (const Band& b : bands)
    if (std::isfinite(b.umin)) rv.push_back({b.d, b.umin});
  ExponentFit fit = fit_growth(rv);
  if (fit.valid && std::isfinite(inf_coeff)) fit.coefficient = inf_coeff;
  return fit;
}

}  // namespace nlfb
