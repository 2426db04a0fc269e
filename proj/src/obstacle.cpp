#include "nlfb/obstacle.hpp"

#include <cmath>

namespace nlfb {

namespace {

bool zero_side(const ExteriorSide& side) {
  return side.kind == ExteriorSide::Kind::Zero ||
         (side.kind == ExteriorSide::Kind::Constant && side.value == 0.0);
}

}  // namespace

ObstacleProblem::ObstacleProblem(Kernel k, GridFunction phi_)
    : kernel(std::move(k)), grid(phi_.grid()), phi(std::move(phi_)) {
  if (kernel.dim() != 1)
    throw std::invalid_argument("obstacle: 1D kernel only");
  if (std::abs(grid.min + grid.max) > 1e-12 * grid.max)
    throw std::invalid_argument("obstacle: window must be symmetric");
  if (!zero_side(phi.left()) || !zero_side(phi.right()))
    throw std::invalid_argument("obstacle: phi must vanish outside the grid");
  for (int i = 0; i < grid.n; ++i) {
    if (!std::isfinite(phi[i]))
      throw std::invalid_argument("obstacle: phi must be finite");
    if (phi[i] != 0.0 && std::abs(grid.x(i)) > grid.max / 2)
      throw std::invalid_argument(
          "obstacle: supp phi must lie inside the inner half of the window");
  }
}

ObstacleResult solve_obstacle(const ObstacleProblem& p, ObstacleOptions opts,
                              Exec exec) {
  const Grid& g = p.grid;
  const int m = g.n - 2;  // interior unknowns; window-edge nodes stay 0
  OperatorWeights w = make_weights(p.kernel, g);
  for (int k = 1; k <= w.kmax; ++k)
    if (w.gamma[k] < 0.0)
      throw std::runtime_error("obstacle: assembly is not an M-matrix");

  Eigen::MatrixXd A = collocation_matrix(w, exec).block(1, 1, m, m);
  Eigen::VectorXd phi_i = p.phi.values().segment(1, m);
  Eigen::VectorXd u = phi_i.cwiseMax(0.0);
  std::vector<bool> active(m);
  for (int i = 0; i < m; ++i) active[i] = phi_i[i] > 0.0;

  int outer = 0;
  bool settled = false;
  if (opts.method != ObstacleOptions::Method::ProjectedGaussSeidel) {
    int cap = opts.method == ObstacleOptions::Method::Auto
                  ? std::min(100, opts.max_outer)
                  : opts.max_outer;
    for (; outer < cap && !settled; ++outer) {
      std::vector<int> inact;
      for (int i = 0; i < m; ++i)
        if (!active[i]) inact.push_back(i);
      int mi = static_cast<int>(inact.size());
      Eigen::MatrixXd Aii(mi, mi);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(mi);
      for (int a = 0; a < mi; ++a) {
        for (int b = 0; b < mi; ++b) Aii(a, b) = A(inact[a], inact[b]);
        for (int i = 0; i < m; ++i)
          if (active[i]) rhs[a] -= A(inact[a], i) * phi_i[i];
      }
      Eigen::VectorXd ui = Aii.ldlt().solve(rhs);
      for (int i = 0; i < m; ++i) u[i] = active[i] ? phi_i[i] : 0.0;
      for (int a = 0; a < mi; ++a) u[inact[a]] = ui[a];

      Eigen::VectorXd lambda = A * u;
      settled = true;
      for (int i = 0; i < m; ++i) {
        bool next = lambda[i] > u[i] - phi_i[i];
        if (next != active[i]) settled = false;
        active[i] = next;
      }
    }
    if (!settled && opts.method == ObstacleOptions::Method::ActiveSet)
      throw std::runtime_error("obstacle: active set did not settle");
  }

  bool fallback = !settled;
  if (fallback) {
    // Projected Gauss-Seidel on the same LCP, warm-started from u.
    for (; outer < opts.max_outer; ++outer) {
      double res = 0.0;
      for (int i = 0; i < m; ++i) {
        double row = A.row(i).dot(u);
        double ucand = u[i] - row / A(i, i);
        u[i] = std::max(phi_i[i], ucand);
      }
      Eigen::VectorXd lu = A * u;
      for (int i = 0; i < m; ++i)
        res = std::max(res, std::abs(std::min(lu[i], u[i] - phi_i[i])));
      if (res <= opts.tol) break;
    }
    if (outer >= opts.max_outer)
      throw std::runtime_error("obstacle: iteration cap exceeded");
  }

  Eigen::VectorXd uf = Eigen::VectorXd::Zero(g.n);
  uf.segment(1, m) = u;
  ObstacleResult res;
  res.u = GridFunction(g, uf);
  res.excess = GridFunction(g, uf - p.phi.values());
  res.s = p.kernel.s();
  res.outer_iterations = outer;
  res.used_fallback = fallback;

  std::vector<bool> mask(g.n, false);
  for (int i = 1; i <= m; ++i) mask[i] = res.u[i] == p.phi[i] && p.phi[i] > 0.0;
  res.contact = Region::from_mask(mask);
  for (const auto& part : res.contact.parts()) {
    res.free_boundary.push_back(g.x(part.begin) - g.h() / 2);
    res.free_boundary.push_back(g.x(part.end - 1) + g.h() / 2);
  }

  Eigen::VectorXd lu = apply_region(w, res.u, Region::interval(1, g.n - 1),
                                    exec);
  res.min_lu = lu.minCoeff();
  res.min_excess = res.excess.values().segment(1, m).minCoeff();
  res.comp_residual =
      lu.cwiseMin(res.excess.values().segment(1, m)).cwiseAbs().maxCoeff();
  return res;
}

std::pair<FreeBoundaryClass, ExponentFit> classify_free_boundary_point(
    const ObstacleResult& r, double x0, const std::vector<double>& radii) {
  const Grid& g = r.u.grid();
  std::vector<std::pair<double, double>> samples;
  for (double rad : radii) {
    double sup = std::max(std::abs(r.excess.eval(x0 - rad)),
                          std::abs(r.excess.eval(x0 + rad)));
    for (int i : Region::ball(g, x0, rad).indices())
      sup = std::max(sup, std::abs(r.excess[i]));
    samples.emplace_back(rad, sup);
  }
  ExponentFit fit = fit_growth(samples);
  double target = 1.0 + r.s;
  double floor = 10.0 * std::pow(g.h(), target);
  if (fit.exponent >= target + 0.1 || fit.coefficient < floor)
    return {FreeBoundaryClass::Degenerate, fit};
  if (fit.exponent >= target - 0.1)
    return {FreeBoundaryClass::Regular, fit};
  throw std::runtime_error("obstacle: under-resolved free boundary fit");
}

ExponentFit obstacle_regularity_report(const ObstacleResult& r) {
  const Grid& g = r.u.grid();
  double h = g.h();
  std::vector<double> du(g.n - 2);
  for (int i = 1; i < g.n - 1; ++i)
    du[i - 1] = (r.u[i + 1] - r.u[i - 1]) / (2 * h);
  std::vector<std::pair<double, double>> mod;
  for (int sep = 4; sep * h <= (g.max - g.min) / 16.0; sep *= 2) {
    double omega = 0.0;
    for (std::size_t i = 0; i + sep < du.size(); ++i)
      omega = std::max(omega, std::abs(du[i + sep] - du[i]));
    mod.emplace_back(sep * h, omega);
  }
  if (mod.size() < 3)
    throw std::runtime_error("obstacle: under-resolved modulus fit");
  return fit_growth(mod);
}

std::pair<double, ExponentFit> expansion_fit(const ObstacleResult& r,
                                             double x0,
                                             const HalfSpaceSolution& b) {
  const Grid& g = r.u.grid();
  double h = g.h();

  // Orientation: the positivity side of x0.
  double e = std::abs(r.excess.eval(x0 + 8 * h)) >
                     std::abs(r.excess.eval(x0 - 8 * h))
                 ? 1.0
                 : -1.0;

  // B = cumulative trapezoid of b, extended by zero to the left.
  const Grid& gb = b.b.grid();
  Eigen::VectorXd Bv(gb.n);
  Bv[0] = 0.0;
  for (int i = 1; i < gb.n; ++i)
    Bv[i] = Bv[i - 1] + gb.h() * (b.b[i] + b.b[i - 1]) / 2;
  GridFunction B(gb, Bv, ExteriorSide::zero(),
                 ExteriorSide::constant(Bv[gb.n - 1]));
  GridFunction Bo = GridFunction::sample(
      g, [&](double x) { return B.eval((x - x0) * e); });

  double c = project_on_barrier(r.excess, Bo, x0, 16 * h);

  Eigen::VectorXd rem = r.excess.values() - c * Bo.values();
  GridFunction remainder(g, rem);
  double scale = r.excess.values().cwiseAbs().maxCoeff();
  std::vector<std::pair<double, double>> samples;
  bool flat = true;
  for (double rad = 0.25; rad >= 8 * h; rad /= 2) {
    double sup = 0.0;
    for (int i : Region::ball(g, x0, rad).indices())
      sup = std::max(sup, std::abs(remainder[i]));
    if (sup > 1e-10 * scale) flat = false;
    samples.emplace_back(rad, sup);
  }
  ExponentFit fit;
  if (flat) {
    fit.exponent = std::numeric_limits<double>::infinity();
    fit.r2 = 1.0;
  } else {
    fit = fit_growth(samples);
  }
  return {c, fit};
}

}  // namespace nlfb
