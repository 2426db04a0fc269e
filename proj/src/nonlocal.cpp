#include "nlfb/nonlocal.hpp"

#include <cmath>
#include <stdexcept>

#include "nlfb/quadrature.hpp"

namespace nlfb {

namespace {

// Exact cell moments of the kernel against the linear interpolation hats:
//   a_k = int_{t_k}^{t_{k+1}} K(t) (t_{k+1} - t)/h dt,
//   b_k = int_{t_k}^{t_{k+1}} K(t) (t - t_k)/h dt.
void cell_hats(const Kernel& k, double t0, double t1, double h, double& a,
               double& b) {
  if (k.is_power()) {
    const double c = k.lam();
    const double i0 = c * power_moment(-1.0 - 2.0 * k.s(), t0, t1);
    const double i1 = c * power_moment(-2.0 * k.s(), t0, t1);
    a = (t1 * i0 - i1) / h;
    b = (i1 - t0 * i0) / h;
    return;
  }
  a = gauss([&](double t) { return k.density(t) * (t1 - t) / h; }, t0, t1);
  b = gauss([&](double t) { return k.density(t) * (t - t0) / h; }, t0, t1);
}

double second_moment(const Kernel& k, double h) {
  if (k.is_power())
    return k.lam() * power_moment(1.0 - 2.0 * k.s(), 0.0, h);
  return tanh_sinh(
      [&](double t) { return std::pow(t, 1.0 - 2.0 * k.s()) * k.envelope(t); },
      0.0, h, 1e-13);
}

double kernel_mass_tail(const Kernel& k, double T, double tol) {
  if (k.is_power()) return k.lam() * power_tail(-1.0 - 2.0 * k.s(), T);
  const double s = k.s();
  const double Lam = k.Lam();
  return log_panels([&](double t) { return k.density(t); }, T,
                    [&](double t) {
                      return Lam * std::pow(t, -2.0 * s) / (2.0 * s);
                    },
                    tol);
}

// Upper bound on |u(y)| for |y| >= t on one side, built from the descriptor.
struct SideBound {
  double amp = 0.0;
  double beta = 0.0;
  double eval(double t) const {
    return amp * (1.0 + std::pow(1.5 * t, beta));
  }
};

SideBound side_bound(const ExteriorSide& e) {
  return SideBound{e.growth_amplitude(), e.growth_exponent()};
}

// int_T^inf (u(x_i + t) + u(x_i - t)) K(t) dt, assuming T puts both sides
// beyond the window.
double descriptor_tail(const OperatorWeights& w, const GridFunction& u,
                       int i, double tol) {
  const double xi = w.grid.x(i);
  const SideBound bl = side_bound(u.left());
  const SideBound br = side_bound(u.right());
  if (bl.amp == 0.0 && br.amp == 0.0) return 0.0;
  const double s = w.kernel.s();
  const double Lam = w.kernel.Lam();
  auto bound = [&](double t) {
    double acc = 0.0;
    for (const SideBound& b : {bl, br}) {
      if (b.amp == 0.0) continue;
      acc += b.amp * (std::pow(t, -2.0 * s) / (2.0 * s) +
                      std::pow(1.5, b.beta) *
                          std::pow(t, b.beta - 2.0 * s) / (2.0 * s - b.beta));
    }
    return Lam * acc;
  };
  auto f = [&](double t) {
    return (u.eval(xi + t) + u.eval(xi - t)) * w.kernel.density(t);
  };
  if (bound(w.T) <= tol) return 0.0;
  return log_panels(f, w.T, bound, tol);
}

}  // namespace

OperatorWeights make_weights(const Kernel& k, const Grid& g, double ext_factor,
                             double tol) {
  if (k.dim() != 1)
    throw std::invalid_argument("make_weights: 1D kernels only");
  OperatorWeights w{k, g, 0.0, 0, 0.0, {}, 0.0, 0.0, tol};
  w.h = g.h();
  w.tol = tol;
  const double span = g.max - g.min;
  const double x0 = std::max(std::abs(g.min), std::abs(g.max));
  const double reach = std::max(ext_factor * span, 3.0 * x0);
  const int kcells = std::max(g.n, static_cast<int>(std::ceil(reach / w.h)));
  w.kmax = kcells + 1;
  w.T = (kcells + 1) * w.h;  // end of the last hat cell
  w.gamma.assign(w.kmax + 1, 0.0);

  // gamma_k = b_{k-1} + a_k, with the first cell's second-difference model
  // folded into gamma_1 and the last cell's right hat kept as gamma_{kmax}.
  std::vector<double> a(kcells + 1, 0.0), b(kcells + 1, 0.0);
#pragma omp parallel for schedule(static)
  for (int kk = 1; kk <= kcells; ++kk)
    cell_hats(k, kk * w.h, (kk + 1) * w.h, w.h, a[kk], b[kk]);
  const double m2 = second_moment(k, w.h);
  w.gamma[1] = m2 / (w.h * w.h) + a[1];
  for (int kk = 2; kk <= kcells; ++kk) w.gamma[kk] = b[kk - 1] + a[kk];
  w.gamma[kcells + 1] = b[kcells];
  w.gamma_sum = 0.0;
  for (int kk = 1; kk <= w.kmax; ++kk) w.gamma_sum += w.gamma[kk];
  w.tail_mass = kernel_mass_tail(k, w.T, tol);
  return w;
}

double apply_node(const OperatorWeights& w, const GridFunction& u, int i) {
  const double ui = u[i];
  double acc = 0.0;
  for (int k = 1; k <= w.kmax; ++k) {
    const double d = 2.0 * ui - u.node(i + k) - u.node(static_cast<long long>(i) - k);
    acc += w.gamma[k] * d;
  }
  acc += 2.0 * ui * w.tail_mass - descriptor_tail(w, u, i, w.tol);
  return 2.0 * acc;
}

Eigen::VectorXd apply_region(const OperatorWeights& w, const GridFunction& u,
                             const Region& nodes, Exec exec) {
  const std::vector<int> idx = nodes.indices();
  Eigen::VectorXd out(idx.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t m = 0; m < idx.size(); ++m)
      out[m] = apply_node(w, u, idx[m]);
  } else {
    for (std::size_t m = 0; m < idx.size(); ++m)
      out[m] = apply_node(w, u, idx[m]);
  }
  return out;
}

double exterior_term(const OperatorWeights& w, const GridFunction& g, int i) {
  double acc = 0.0;
  const int n = w.grid.n;
  for (int k = 1; k <= w.kmax; ++k) {
    if (i + k >= n) acc += w.gamma[k] * g.node(i + k);
    if (i - k < 0) acc += w.gamma[k] * g.node(static_cast<long long>(i) - k);
  }
  acc += descriptor_tail(w, g, i, w.tol);
  return 2.0 * acc;
}

Eigen::MatrixXd collocation_matrix(const OperatorWeights& w, Exec exec) {
  const int n = w.grid.n;
  Eigen::MatrixXd A(n, n);
  const double diag = w.diag();
  auto fill_row = [&](int i) {
    for (int j = 0; j < n; ++j)
      A(i, j) = (i == j) ? diag : -2.0 * w.gamma[std::abs(i - j)];
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) fill_row(i);
  } else {
    for (int i = 0; i < n; ++i) fill_row(i);
  }
  return A;
}

StiffnessForm assemble_stiffness(const Kernel& k, const Grid& g,
                                 const Region& omega, Exec exec) {
  OperatorWeights w = make_weights(k, g);
  StiffnessForm f{k, g, omega, collocation_matrix(w, exec), w.tol};
  f.A *= w.h;
  return f;
}

std::optional<double> dirichlet_energy(const OperatorWeights& w,
                                       const GridFunction& u,
                                       const Region& omega, Exec exec) {
  const int n = w.grid.n;
  const double s = w.kernel.s();
  const double Lam = w.kernel.Lam();
  const double h = w.h;
  if (!omega.empty()) {
    for (const ExteriorSide* e : {&u.left(), &u.right()}) {
      if (e->growth_amplitude() > 0.0 && e->growth_exponent() >= s)
        return std::nullopt;  // (u_i - u(y))^2 K not integrable at infinity
    }
  }
  std::vector<char> in(n, 0);
  for (int i : omega.indices()) in[i] = 1;

  // In-grid and virtual-lattice pair sum.
  std::vector<double> row(n, 0.0);
  auto row_sum = [&](int i) {
    double acc = 0.0;
    const double ui = u[i];
    for (int k = 1; k <= w.kmax; ++k) {
      // pair {i, i+k}: count once
      if (i + k < n) {
        if (in[i] || in[i + k]) {
          const double d = ui - u[i + k];
          acc += 2.0 * w.gamma[k] * d * d;
        }
      } else if (in[i]) {
        const double d = ui - u.node(i + k);
        acc += 2.0 * w.gamma[k] * d * d;
      }
      if (in[i] && i - k < 0) {
        const double d = ui - u.node(static_cast<long long>(i) - k);
        acc += 2.0 * w.gamma[k] * d * d;
      }
    }
    return acc;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) row[i] = row_sum(i);
  } else {
    for (int i = 0; i < n; ++i) row[i] = row_sum(i);
  }
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += row[i];

  // Far tail for Omega nodes against u's own descriptor.
  const SideBound bl = side_bound(u.left());
  const SideBound br = side_bound(u.right());
  for (int i : omega.indices()) {
    const double xi = w.grid.x(i);
    const double ui = u[i];
    auto bound = [&](double t) {
      double bb = 4.0 * ui * ui * std::pow(t, -2.0 * s) / (2.0 * s);
      for (const SideBound& b : {bl, br}) {
        if (b.amp == 0.0) continue;
        const double c2 = b.amp * b.amp;
        bb += 4.0 * c2 * (std::pow(t, -2.0 * s) / (2.0 * s) +
                          std::pow(1.5, 2.0 * b.beta) *
                              std::pow(t, 2.0 * b.beta - 2.0 * s) /
                              (2.0 * s - 2.0 * b.beta));
      }
      return Lam * bb;
    };
    auto f = [&](double t) {
      const double dr = ui - u.eval(xi + t);
      const double dl = ui - u.eval(xi - t);
      return (dr * dr + dl * dl) * w.kernel.density(t);
    };
    if (bound(w.T) > w.tol)
      acc += 2.0 * log_panels(f, w.T, bound, w.tol);
    else if (ui != 0.0 || bl.amp > 0.0 || br.amp > 0.0)
      acc += 2.0 * log_panels(f, w.T, bound, w.tol * 1e-3 + 1e-300);
  }
  return h * acc;
}

QuadraticEnergy make_energy(const OperatorWeights& w, const Region& omega,
                            const GridFunction& data, Exec exec) {
  QuadraticEnergy q;
  q.omega = omega;
  q.idx = omega.indices();
  const int m = static_cast<int>(q.idx.size());
  const int n = w.grid.n;
  const double h = w.h;
  q.G.resize(m, m);
  const double diag = h * w.diag();
  auto fill_row = [&](int a) {
    for (int b = 0; b < m; ++b) {
      q.G(a, b) = (a == b) ? diag
                           : -2.0 * h * w.gamma[std::abs(q.idx[a] - q.idx[b])];
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int a = 0; a < m; ++a) fill_row(a);
  } else {
    for (int a = 0; a < m; ++a) fill_row(a);
  }
  q.l.resize(m);
  std::vector<char> in(n, 0);
  for (int i : q.idx) in[i] = 1;
  for (int a = 0; a < m; ++a) {
    const int i = q.idx[a];
    double acc = exterior_term(w, data, i);
    for (int j = 0; j < n; ++j)
      if (!in[j] && i != j) acc += 2.0 * w.gamma[std::abs(i - j)] * data[j];
    q.l[a] = h * acc;
  }
  GridFunction base = data;
  for (int i : q.idx) base[i] = 0.0;
  auto e0 = dirichlet_energy(w, base, omega, exec);
  q.c0_finite = e0.has_value();
  q.c0 = e0.value_or(0.0);
  return q;
}

namespace {

// Contribution of a sub-cell [t0, t1] with linear second difference
// d(t) = alpha + beta t against the pure power kernel env * t^{-1-2s}.
double linear_power_piece(double alpha, double beta, double env, double s,
                          double t0, double t1) {
  return env * (alpha * power_moment(-1.0 - 2.0 * s, t0, t1) +
                beta * power_moment(-2.0 * s, t0, t1));
}

}  // namespace

double extremal_minus(double lam, double Lam, double s, const GridFunction& u,
                      int i) {
  if (!(lam > 0.0 && Lam >= lam)) throw std::invalid_argument("extremal_minus");
  const Grid& g = u.grid();
  const double h = g.h();
  const double xi = g.x(i);
  const double span = g.max - g.min;
  const double x0 = std::max(std::abs(g.min), std::abs(g.max));
  const int kmax = std::max(g.n, static_cast<int>(
      std::ceil(std::max(2.0 * span, 3.0 * x0) / h)));
  const double ui = u[i];
  auto delta = [&](long long k) {
    return 2.0 * ui - u.node(i + k) - u.node(static_cast<long long>(i) - k);
  };
  double acc = 0.0;
  // First cell: quadratic model, sign decided by d(h).
  {
    const double d1 = delta(1);
    const double env = d1 < 0.0 ? Lam : lam;
    acc += env * (d1 / (h * h)) * power_moment(1.0 - 2.0 * s, 0.0, h);
  }
  for (int k = 1; k <= kmax; ++k) {
    const double t0 = k * h, t1 = (k + 1) * h;
    const double d0 = delta(k), d1 = delta(k + 1);
    const double slope = (d1 - d0) / h;
    const double alpha = d0 - slope * t0;
    if (d0 * d1 >= 0.0) {
      const double env = (d0 + d1 < 0.0) ? Lam : lam;
      acc += linear_power_piece(alpha, slope, env, s, t0, t1);
    } else {
      const double tc = t0 + (0.0 - d0) / slope;
      const double env0 = d0 < 0.0 ? Lam : lam;
      const double env1 = d1 < 0.0 ? Lam : lam;
      acc += linear_power_piece(alpha, slope, env0, s, t0, tc);
      acc += linear_power_piece(alpha, slope, env1, s, tc, t1);
    }
  }
  // Far tail with pointwise envelope choice.
  const double T = (kmax + 1) * h;
  const SideBound bl = side_bound(u.left());
  const SideBound br = side_bound(u.right());
  auto bound = [&](double t) {
    double bb = 2.0 * std::abs(ui) * std::pow(t, -2.0 * s) / (2.0 * s);
    for (const SideBound& b : {bl, br}) {
      if (b.amp == 0.0) continue;
      bb += b.amp * (std::pow(t, -2.0 * s) / (2.0 * s) +
                     std::pow(1.5, b.beta) * std::pow(t, b.beta - 2.0 * s) /
                         (2.0 * s - b.beta));
    }
    return Lam * bb;
  };
  auto f = [&](double t) {
    const double d = 2.0 * ui - u.eval(xi + t) - u.eval(xi - t);
    return d * (d < 0.0 ? Lam : lam) * std::pow(t, -1.0 - 2.0 * s);
  };
  if (bound(T) > 1e-13) acc += log_panels(f, T, bound, 1e-13);
  return 2.0 * acc;
}

namespace {

double binom_real(double beta, int m) {
  double v = 1.0;
  for (int j = 0; j < m; ++j) v *= (beta - j) / (j + 1);
  return v;
}

}  // namespace

double extremal_minus_power_profile(double lam, double Lam, double s,
                                    double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("power profile exponent must be in (0,1)");
  auto delta = [beta](double t) {
    const double om = 1.0 - t;
    return 2.0 - std::pow(1.0 + t, beta) -
           (om > 0.0 ? std::pow(om, beta) : 0.0);
  };
  // d > 0 on (0, t*), d < 0 beyond, with t* = 2^{1/beta} - 1 > 1.
  const double tstar = std::pow(2.0, 1.0 / beta) - 1.0;
  const double eps = 1e-3;
  double acc = 0.0;
  // series on [0, eps]: d(t) = -2 sum_m binom(beta, 2m) t^{2m}
  for (int m = 1; m <= 4; ++m)
    acc += lam * (-2.0) * binom_real(beta, 2 * m) *
           std::pow(eps, 2.0 * m - 2.0 * s) / (2.0 * m - 2.0 * s);
  auto integrand = [&](double t) {
    return delta(t) * std::pow(t, -1.0 - 2.0 * s);
  };
  acc += lam * tanh_sinh(integrand, eps, 1.0, 1e-13);
  acc += lam * adaptive(integrand, 1.0, tstar, 1e-13);
  const double T = std::max(4.0 * tstar, 64.0);
  acc += Lam * adaptive(integrand, tstar, T, 1e-13);
  // analytic tail: int_T^inf (2 - (1+t)^beta) t^{-1-2s} dt via binomial series
  double tail = 2.0 * power_tail(-1.0 - 2.0 * s, T);
  for (int m = 0; m <= 12; ++m)
    tail -= binom_real(beta, m) * power_tail(beta - m - 1.0 - 2.0 * s, T);
  acc += Lam * tail;
  return 2.0 * acc;
}

double beta0(double lam, double Lam, double s, double tol_beta) {
  const double margin = 1e-3;
  double lo = std::max(0.0, 2.0 * s - 1.0) + margin;
  double hi = std::min(1.0, 2.0 * s) - margin;
  double clo = extremal_minus_power_profile(lam, Lam, s, lo);
  double chi = extremal_minus_power_profile(lam, Lam, s, hi);
  if (!(clo > 0.0 && chi < 0.0))
    throw std::runtime_error(
        "beta0: bracket does not change sign (quadrature failure?)");
  while (hi - lo > tol_beta) {
    const double mid = 0.5 * (lo + hi);
    const double c = extremal_minus_power_profile(lam, Lam, s, mid);
    if (c > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double apply_callable(const Kernel& k, const std::function<double(double)>& u,
                      double x, double inner_radius, double far_radius,
                      double tol) {
  if (k.dim() != 1)
    throw std::invalid_argument("apply_callable: 1D kernels only");
  const double s = k.s();
  const double ux = u(x);
  auto delta = [&](double t) { return 2.0 * ux - u(x + t) - u(x - t); };
  // quadratic model on [0, eps]
  const double eps = inner_radius;
  double acc = (delta(eps) / (eps * eps)) *
               (k.is_power() ? k.lam() * power_moment(1.0 - 2.0 * s, 0.0, eps)
                             : tanh_sinh(
                                   [&](double t) {
                                     return std::pow(t, 1.0 - 2.0 * s) *
                                            k.envelope(t);
                                   },
                                   0.0, eps, 1e-13));
  // dyadic panels [eps, R], adaptive within each panel
  double lo = eps;
  auto f = [&](double t) { return delta(t) * k.density(t); };
  while (lo < far_radius) {
    const double hi = std::min(2.0 * lo, far_radius);
    acc += adaptive(f, lo, hi, tol * 0.05);
    lo = hi;
  }
  // beyond far_radius u is assumed negligible: remaining mass times 2 u(x)
  if (ux != 0.0) {
    if (k.is_power())
      acc += 2.0 * ux * k.lam() * power_tail(-1.0 - 2.0 * s, far_radius);
    else
      acc += 2.0 * ux *
             log_panels([&](double t) { return k.density(t); }, far_radius,
                        [&](double t) {
                          return k.Lam() * std::pow(t, -2.0 * s) / (2.0 * s);
                        },
                        tol);
  }
  return 2.0 * acc;
}

double apply_callable_2d(const Kernel& k2,
                         const std::function<double(double)>& f,
                         double x_dot_e, double tol) {
  if (k2.dim() != 2)
    throw std::invalid_argument("apply_callable_2d: needs a 2D kernel");
  const double s = k2.s();
  const double p = x_dot_e;
  // For each angle, substitute tau = r |cos theta|:
  //   I(theta) = |cos theta|^{2s} int_0^inf d(tau) env(tau/|cos|) tau^{-1-2s} dtau
  // and L = 2 int_0^pi I. The inner integral is evaluated with the 1D
  // machinery through a direction-dependent 1D kernel.
  auto inner = [&](double c) {
    const double ac = std::abs(c);
    if (ac < 1e-14) return 0.0;
    Kernel k1 = custom_kernel(1, s, k2.lam(), k2.Lam(),
                              [&k2, ac](double t) { return k2.envelope(t / ac); });
    // apply_callable returns 2x the half-line integral; I(theta) needs 1x.
    return std::pow(ac, 2.0 * s) * 0.5 *
           apply_callable(k1, f, p, 1e-4, 1e6, tol * 0.1);
  };
  const double pi = std::acos(-1.0);
  const double half = 0.5 * pi;
  const double left =
      tanh_sinh([&](double th) { return inner(std::cos(th)); }, 0.0, half, tol);
  const double right = tanh_sinh([&](double th) { return inner(std::cos(th)); },
                                 half, pi, tol);
  return 2.0 * (left + right);
}

}  // namespace nlfb
