#include "nlfb/onephase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nlfb {

namespace {

void check_side_nonneg(const ExteriorSide& e) {
  using Kind = ExteriorSide::Kind;
  bool ok = true;
  switch (e.kind) {
    case Kind::Zero: break;
    case Kind::Constant: ok = e.value >= 0.0; break;
    case Kind::Power: ok = e.amplitude >= 0.0; break;
    case Kind::Sampled:
      ok = e.amplitude >= 0.0;
      for (double v : e.vals) ok = ok && v >= 0.0;
      break;
  }
  if (!ok) throw std::invalid_argument("one-phase: exterior data must be >= 0");
}

struct Workspace {
  OperatorWeights w;
  QuadraticEnergy q;
  std::vector<int> idx;
  int m = 0;
  double Mh = 0.0;

  Workspace(const OnePhaseProblem& p, Exec exec)
      : w(make_weights(p.kernel, p.grid)),
        q(make_energy(w, p.omega, p.g, exec)),
        idx(q.idx),
        m(static_cast<int>(q.idx.size())),
        Mh(p.M * w.h) {}

  // Minimize the quadratic over the non-contact nodes with zeros on the
  // contact set; the M-matrix structure and g >= 0 keep the solution >= 0.
  Eigen::VectorXd solve_free(const std::vector<char>& contact) const {
    std::vector<int> F;
    F.reserve(m);
    for (int a = 0; a < m; ++a)
      if (!contact[a]) F.push_back(a);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
    const int f = static_cast<int>(F.size());
    if (f == 0) return u;
    Eigen::MatrixXd G(f, f);
    Eigen::VectorXd l(f);
    for (int a = 0; a < f; ++a) {
      for (int b = 0; b < f; ++b) G(a, b) = q.G(F[a], F[b]);
      l[a] = q.l[F[a]];
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    if (ldlt.info() != Eigen::Success)
      throw std::runtime_error("one-phase: factorization failed");
    Eigen::VectorXd s = ldlt.solve(l);
    for (int a = 0; a < f; ++a) u[F[a]] = std::max(s[a], 0.0);
    return u;
  }

  int positive_count(const Eigen::VectorXd& u) const {
    int np = 0;
    for (int a = 0; a < m; ++a)
      if (u[a] > 0.0) ++np;
    return np;
  }

  double total(const Eigen::VectorXd& u) const {
    return q.value(u) + Mh * positive_count(u);
  }
};

MinimizerResult pack_result(const OnePhaseProblem& p, const Workspace& ws,
                            const Eigen::VectorXd& u_omega,
                            std::vector<double> trace, bool exhaustive,
                            Exec exec) {
  MinimizerResult r;
  r.u = p.g;
  std::vector<bool> con(p.grid.n, false), pos(p.grid.n, false);
  for (int a = 0; a < ws.m; ++a) {
    const int i = ws.idx[a];
    r.u[i] = u_omega[a];
    (u_omega[a] > 0.0 ? pos : con)[i] = true;
  }
  r.contact = Region::from_mask(con);
  r.positivity = Region::from_mask(pos);
  r.energy = energy(p, r.u, exec);
  r.trace = std::move(trace);
  r.s = p.kernel.s();
  r.exhaustive = exhaustive;
  return r;
}

}  // namespace

OnePhaseProblem::OnePhaseProblem(Kernel k, Region omega_, double M_,
                                 GridFunction g_)
    : kernel(std::move(k)), grid(g_.grid()), omega(std::move(omega_)), M(M_),
      g(std::move(g_)) {
  if (!(M > 0.0)) throw std::invalid_argument("one-phase: M > 0 required");
  if (omega.empty()) throw std::invalid_argument("one-phase: empty domain");
  for (const auto& part : omega.parts())
    if (part.begin < 0 || part.end > grid.n)
      throw std::invalid_argument("one-phase: domain outside grid");
  for (int i = 0; i < grid.n; ++i)
    if (g[i] < 0.0)
      throw std::invalid_argument("one-phase: exterior data must be >= 0");
  check_side_nonneg(g.left());
  check_side_nonneg(g.right());
  validate_exterior(g.left(), kernel.s());
  validate_exterior(g.right(), kernel.s());
}

EnergySplit energy(const OnePhaseProblem& p, const GridFunction& u,
                   Exec exec) {
  OperatorWeights w = make_weights(p.kernel, p.grid);
  EnergySplit e;
  auto dir = dirichlet_energy(w, u, p.omega, exec);
  e.dirichlet_absolute = dir.has_value();
  if (dir) {
    e.dirichlet = *dir;
  } else {
    QuadraticEnergy q = make_energy(w, p.omega, u, exec);
    Eigen::VectorXd uo(q.idx.size());
    for (std::size_t a = 0; a < q.idx.size(); ++a) uo[a] = u[q.idx[a]];
    e.dirichlet = q.value(uo);
  }
  int np = 0;
  for (int i : p.omega.indices())
    if (u[i] > 0.0) ++np;
  e.measure = p.M * w.h * np;
  return e;
}

namespace {

// Block moves in contact-interval space: the node-wise flip test is blind to
// multi-node rearrangements (zeroing one more boundary node can raise the
// energy while zeroing three lowers it), so endpoint shifts and anchored
// seed intervals are retried with exact re-solves.
bool polish_contact(const Workspace& ws, std::vector<char>& contact,
                    double& total) {
  const int m = ws.m;
  std::vector<int> offsets;
  for (int k = 1; k <= 8 && k <= m; ++k) offsets.push_back(k);
  for (int k = 16; k <= m; k *= 2) offsets.push_back(k);

  std::vector<std::vector<char>> candidates;
  auto with_run = [&](int a, int b, char v) {
    a = std::max(a, 0);
    b = std::min(b, m);
    if (a >= b) return;
    candidates.push_back(contact);
    std::fill(candidates.back().begin() + a, candidates.back().begin() + b, v);
  };
  int a = 0;
  while (a < m) {
    if (!contact[a]) {
      ++a;
      continue;
    }
    int b = a;
    while (b < m && contact[b]) ++b;
    for (int k : offsets) {
      with_run(a - k, a, 1);  // extend left
      with_run(a, a + k, 0);  // shrink left
      with_run(b, b + k, 1);  // extend right
      with_run(b - k, b, 0);  // shrink right
    }
    a = b;
  }
  for (int k : offsets) {  // seeds anchored at the domain ends
    if (!contact[0]) with_run(0, k, 1);
    if (!contact[m - 1]) with_run(m - k, m, 1);
  }

  bool improved = false;
  for (const auto& cand : candidates) {
    Eigen::VectorXd u = ws.solve_free(cand);
    const double t = ws.total(u);
    if (t < total) {
      total = t;
      contact = cand;
      improved = true;
    }
  }
  return improved;
}

}  // namespace

MinimizerResult minimize_alternating(const OnePhaseProblem& p,
                                     const GridFunction& u_init, Exec exec) {
  Workspace ws(p, exec);
  std::vector<char> contact(ws.m, 0);
  for (int a = 0; a < ws.m; ++a) contact[a] = u_init[ws.idx[a]] <= 0.0;

  std::vector<double> trace;
  double prev = std::numeric_limits<double>::infinity();
  const int cap = 10000;
  for (int sweep = 0; sweep < cap; ++sweep) {
    Eigen::VectorXd u = ws.solve_free(contact);
    Eigen::VectorXd r = ws.q.G * u - ws.q.l;
    int flips = 0;
    for (int pass = 0, moved = 1; moved && pass < cap; ++pass) {
      moved = 0;
      for (int a = 0; a < ws.m; ++a) {
        const double gaa = ws.q.G(a, a);
        if (u[a] > 0.0) {
          // zero the node: quadratic row test plus the M h measure credit
          const double de = u[a] * u[a] * gaa - 2.0 * u[a] * r[a] - ws.Mh;
          if (de < 0.0) {
            r -= u[a] * ws.q.G.col(a);
            u[a] = 0.0;
            contact[a] = 1;
            ++moved;
          }
        } else {
          const double t = -r[a] / gaa;
          if (t > 0.0 && ws.Mh - r[a] * r[a] / gaa < 0.0) {
            r += t * ws.q.G.col(a);
            u[a] = t;
            contact[a] = 0;
            ++moved;
          }
        }
      }
      flips += moved;
    }
    double total = ws.total(u);
    trace.push_back(total);
    if (flips == 0 && prev - total < 1e-12) {
      if (!polish_contact(ws, contact, total)) {
        for (int a = 0; a < ws.m; ++a)
          if (contact[a]) u[a] = 0.0;
        return pack_result(p, ws, u, std::move(trace), true, exec);
      }
      trace.push_back(total);
    }
    prev = total;
  }
  std::ostringstream msg;
  msg << "one-phase: alternating minimization did not settle in " << cap
      << " sweeps; last energies";
  for (std::size_t k = trace.size() >= 5 ? trace.size() - 5 : 0;
       k < trace.size(); ++k)
    msg << ' ' << trace[k];
  throw std::runtime_error(msg.str());
}

MinimizerResult minimize_alternating(const OnePhaseProblem& p, Exec exec) {
  GridFunction init = p.g;
  for (int i : p.omega.indices()) init[i] = 1.0;  // empty contact set
  return minimize_alternating(p, init, exec);
}

MinimizerResult minimize_bruteforce_1d(const OnePhaseProblem& p, Exec exec) {
  Workspace ws(p, exec);
  const int m = ws.m;
  std::vector<char> contact(m, 0);
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_u;

  auto try_candidate = [&](auto&& mark) {
    std::fill(contact.begin(), contact.end(), 0);
    mark(contact);
    Eigen::VectorXd u = ws.solve_free(contact);
    const double total = ws.total(u);
    if (total < best) {
      best = total;
      best_u = u;
    }
  };

  const bool exhaustive = p.grid.n <= 64;
  try_candidate([](std::vector<char>&) {});
  if (exhaustive) {
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b <= m; ++b)
        try_candidate([&](std::vector<char>& c) {
          std::fill(c.begin() + a, c.begin() + b, 1);
        });
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        for (int c = b + 1; c < m; ++c)
          for (int d = c + 1; d <= m; ++d)
            try_candidate([&](std::vector<char>& cm) {
              std::fill(cm.begin() + a, cm.begin() + b, 1);
              std::fill(cm.begin() + c, cm.begin() + d, 1);
            });
  } else {
    // Left-anchored interval ansatz [0, b), scanned coarse to fine.
    auto try_b = [&](int b) {
      try_candidate([&](std::vector<char>& c) {
        std::fill(c.begin(), c.begin() + b, 1);
      });
    };
    int best_b = 0, stride = std::max(1, m / 32);
    double best_scan = std::numeric_limits<double>::infinity();
    auto scan = [&](int lo, int hi, int st) {
      for (int b = lo; b <= hi; b += st) {
        try_b(b);
        if (best < best_scan) {
          best_scan = best;
          best_b = b;
        }
      }
    };
    scan(0, m, stride);
    while (stride > 1) {
      const int st = std::max(1, stride / 2);
      scan(std::max(0, best_b - stride), std::min(m, best_b + stride), st);
      stride = st;
    }
  }
  return pack_result(p, ws, best_u, {best}, exhaustive, exec);
}

MinimizerResult minimize_swept_M(OnePhaseProblem p, double& chosen_M,
                                 Exec exec) {
  // Dyadic sweep from M = 2 toward the smallest M with a contact point;
  // bisect in log scale once the all-positive / all-contact window is
  // bracketed tighter than a factor of 2.
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  double M = 2.0;
  for (int it = 0; it < 80; ++it) {
    p.M = M;
    MinimizerResult r = minimize_alternating(p, exec);
    if (r.contact.empty()) lo = M;        // M too small: everywhere positive
    else if (r.positivity.empty()) hi = M;  // M too large: u = 0 on Omega
    else {
      chosen_M = M;
      return r;
    }
    if (lo == 0.0) M = hi / 2.0;
    else if (!std::isfinite(hi)) M = lo * 2.0;
    else if (hi / lo < 1.0 + 1e-9) break;
    else M = std::sqrt(lo * hi);
  }
  throw std::runtime_error(
      "one-phase: M sweep found no minimizer with both contact and "
      "positivity (window below resolution)");
}

ResidualCertificate residual_certificate(const OnePhaseProblem& p,
                                         const MinimizerResult& r, Exec exec) {
  OperatorWeights w = make_weights(p.kernel, p.grid);
  ResidualCertificate cert;
  cert.max_lu_omega = -std::numeric_limits<double>::infinity();
  cert.max_abs_lu_positivity = 0.0;
  cert.min_u = std::numeric_limits<double>::infinity();
  for (int i = 0; i < p.grid.n; ++i) cert.min_u = std::min(cert.min_u, r.u[i]);

  std::vector<int> interior;
  for (int i : p.omega.indices())
    if (p.omega.contains(i - 1) && p.omega.contains(i + 1))
      interior.push_back(i);
  const int ni = static_cast<int>(interior.size());
  Eigen::VectorXd lu(ni);
  auto eval = [&](int a) { lu[a] = apply_node(w, r.u, interior[a]); };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int a = 0; a < ni; ++a) eval(a);
  } else {
    for (int a = 0; a < ni; ++a) eval(a);
  }
  for (int a = 0; a < ni; ++a) {
    const int i = interior[a];
    cert.max_lu_omega = std::max(cert.max_lu_omega, lu[a]);
    if (r.u[i] > 0.0 && i > 0 && i + 1 < p.grid.n && r.u[i - 1] > 0.0 &&
        r.u[i + 1] > 0.0)
      cert.max_abs_lu_positivity =
          std::max(cert.max_abs_lu_positivity, std::abs(lu[a]));
  }
  return cert;
}

namespace {

double sup_ball(const GridFunction& u, double x0, double r) {
  const Grid& g = u.grid();
  const double h = g.h();
  double s = std::max(u.eval(x0 - r), u.eval(x0 + r));
  const int i0 = std::max(0, (int)std::ceil((x0 - r - g.min) / h));
  const int i1 = std::min(g.n - 1, (int)std::floor((x0 + r - g.min) / h));
  for (int i = i0; i <= i1; ++i) s = std::max(s, u[i]);
  return s;
}

}  // namespace

std::vector<DensitySample> density_report(const MinimizerResult& r, double x0,
                                          const std::vector<double>& radii) {
  const Grid& g = r.u.grid();
  const double h = g.h();
  std::vector<DensitySample> out;
  for (double rad : radii) {
    const int i0 = std::max(0, (int)std::ceil((x0 - rad - g.min) / h));
    const int i1 = std::min(g.n - 1, (int)std::floor((x0 + rad - g.min) / h));
    int np = 0, nt = 0;
    for (int i = i0; i <= i1; ++i) {
      ++nt;
      if (r.u[i] > 0.0) ++np;
    }
    DensitySample d;
    d.r = rad;
    d.ratio = nt > 0 ? double(np) / nt : 0.0;
    d.resolved = rad >= 4.0 * h && nt > 0;
    out.push_back(d);
  }
  return out;
}

NondegeneracyReport nondegeneracy_report(const MinimizerResult& r, double x0,
                                         const std::vector<double>& radii) {
  NondegeneracyReport rep;
  rep.kappa = std::numeric_limits<double>::infinity();
  for (double rad : radii) {
    const double ratio = sup_ball(r.u, x0, rad) / std::pow(rad, r.s);
    rep.sup_ratio.push_back({rad, ratio});
    rep.kappa = std::min(rep.kappa, ratio);
  }

  // Lemma 4.6 companion: u / dist^s at positivity nodes, distance to the
  // nearest nonpositive node under the half-cell convention.
  const Grid& g = r.u.grid();
  const double h = g.h();
  const int n = g.n;
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  double last = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (r.u[i] <= 0.0) last = g.x(i);
    else dist[i] = g.x(i) - last - 0.5 * h;
  }
  last = std::numeric_limits<double>::infinity();
  for (int i = n - 1; i >= 0; --i) {
    if (r.u[i] <= 0.0) last = g.x(i);
    else dist[i] = std::min(dist[i], last - g.x(i) - 0.5 * h);
  }
  rep.dist_coefficient = std::numeric_limits<double>::infinity();
  for (int i : r.positivity.indices())
    if (std::isfinite(dist[i]) && dist[i] > 0.0)
      rep.dist_coefficient =
          std::min(rep.dist_coefficient, r.u[i] / std::pow(dist[i], r.s));
  if (!std::isfinite(rep.dist_coefficient)) rep.dist_coefficient = 0.0;
  return rep;
}

ExponentFit optimal_regularity_report(const MinimizerResult& r, double x0,
                                      const std::vector<double>& radii) {
  std::vector<std::pair<double, double>> rv;
  for (double rad : radii) rv.push_back({rad, sup_ball(r.u, x0, rad)});
  return fit_growth(rv);
}

double minmax_identity_gap(double w1, double p1, double w2, double p2) {
  auto pos = [](double t) { return t > 0.0 ? t : 0.0; };
  auto neg = [](double t) { return t < 0.0 ? -t : 0.0; };
  const double lhs = (std::max(w1, p1) - std::max(w2, p2)) *
                         (std::max(w1, p1) - std::max(w2, p2)) +
                     (std::min(w1, p1) - std::min(w2, p2)) *
                         (std::min(w1, p1) - std::min(w2, p2));
  const double rhs = (w1 - w2) * (w1 - w2) + (p1 - p2) * (p1 - p2) -
                     2.0 * pos(w1 - p1) * neg(w2 - p2) -
                     2.0 * neg(w1 - p1) * pos(w2 - p2);
  return lhs - rhs;
}

}  // namespace nlfb
