#include "nlfb/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <set>

#include "nlfb/io.hpp"
#include "nlfb/obstacle.hpp"
#include "nlfb/version.hpp"

namespace nlfb {

namespace {

using nlohmann::json;

struct Run {
  json config;  // resolved (defaults written back)
  std::string dir;
  bool verbose = false;
  bool plots = true;
  json report;
  std::vector<std::string> failures;
  std::vector<std::string> outputs;

  std::string path(const std::string& name) {
    outputs.push_back(name);
    return dir + "/" + name;
  }
  void fail(const std::string& what) { failures.push_back(what); }
};

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object())
    throw std::runtime_error("config: " + where + " must be an object");
  for (auto& [key, _] : obj.items())
    if (!allowed.count(key))
      throw std::runtime_error("config: unknown key '" + key + "' in " + where);
}

Kernel make_kernel(const std::string& family, int n, double s, double lam,
                   double Lam, double freq) {
  if (family == "fractional_laplacian") return fractional_laplacian_kernel(n, s);
  if (family == "oscillating") return oscillating_kernel(n, s, lam, Lam, freq);
  if (family == "dyadic") return dyadic_kernel(n, s, lam, Lam);
  throw std::runtime_error("config: unknown kernel family '" + family + "'");
}

Kernel parse_kernel(json& k, int n_override = 0) {
  check_keys(k, {"family", "n", "s", "lam", "Lam", "log_frequency"}, "kernel");
  std::string family = k.at("family");
  if (!k.contains("n")) k["n"] = 1;
  int n = n_override ? n_override : k["n"].get<int>();
  double s = k.at("s");
  double lam = k.value("lam", 0.0), Lam = k.value("Lam", 0.0);
  double freq = k.value("log_frequency", 0.0);
  return make_kernel(family, n, s, lam, Lam, freq);
}

Grid parse_grid(json& g) {
  check_keys(g, {"min", "max", "nodes"}, "grid");
  return Grid(g.at("min"), g.at("max"), g.at("nodes"));
}

// Data described by an exterior block; values are sampled on the whole grid
// (solvers overwrite the domain part).
GridFunction parse_exterior(json& e, const Grid& g) {
  check_keys(e, {"type", "value", "amplitude", "exponent"}, "exterior");
  std::string type = e.at("type");
  if (type == "zero") return GridFunction::constant(g, 0.0);
  if (type == "constant") {
    double v = e.at("value");
    return GridFunction(g, Eigen::VectorXd::Constant(g.n, v),
                        ExteriorSide::constant(v), ExteriorSide::constant(v));
  }
  if (type == "power_plus") {
    double A = e.at("amplitude"), beta = e.at("exponent");
    return GridFunction::sample(
        g, [&](double x) { return x > 0 ? A * std::pow(x, beta) : 0.0; },
        ExteriorSide::zero(), ExteriorSide::power(A, beta));
  }
  if (type == "indicator_right")
    return GridFunction::sample(
        g, [](double x) { return x > 0 ? 1.0 : 0.0; }, ExteriorSide::zero(),
        ExteriorSide::constant(1.0));
  throw std::runtime_error("config: unknown exterior type '" + type + "'");
}

std::vector<double> parse_radii(json& r) {
  check_keys(r, {"r_max", "count", "per_octave"}, "radii");
  double r_max = r.at("r_max");
  int count = r.at("count");
  if (!r.contains("per_octave")) r["per_octave"] = 4;
  double per = r["per_octave"];
  std::vector<double> radii;
  for (int j = 0; j < count; ++j)
    radii.push_back(r_max * std::pow(2.0, -j / per));
  return radii;
}

// Replaces the literal string "s" anywhere in the block by the kernel order;
// lets one config with an s-array keep exponents in sync per run.
json subst_s(json j, double s) {
  if (j.is_string() && j.get<std::string>() == "s") return s;
  if (j.is_object() || j.is_array())
    for (auto& e : j) e = subst_s(e, s);
  return j;
}

SvgSeries series_of(const GridFunction& u, const std::string& label) {
  SvgSeries s{label, {}};
  for (int i = 0; i < u.grid().n; ++i)
    s.points.emplace_back(u.grid().x(i), u[i]);
  return s;
}

// ---------------------------------------------------------------- dirichlet

void check_reference(Run& run, json& ref, const GridFunction& u,
                     const Region& omega, const std::string& suffix) {
  check_keys(ref,
             {"type", "amplitude", "exponent", "tolerance",
              "boundary_layer_cells", "center_value"},
             "checks.reference");
  std::string type = ref.at("type");
  double tol = ref.at("tolerance");
  if (!ref.contains("boundary_layer_cells")) ref["boundary_layer_cells"] = 4;
  int layer = ref["boundary_layer_cells"];
  std::function<double(double)> exact;
  if (type == "getoor") {
    exact = [](double x) {
      return x * x < 1.0 ? std::sqrt(1.0 - x * x) : 0.0;
    };
  } else if (type == "power_plus") {
    double A = ref.at("amplitude"), beta = ref.at("exponent");
    exact = [A, beta](double x) {
      return x > 0 ? A * std::pow(x, beta) : 0.0;
    };
  } else {
    throw std::runtime_error("config: unknown reference type '" + type + "'");
  }
  const Grid& g = u.grid();
  double err = 0.0;
  for (const auto& part : omega.parts())
    for (int i = part.begin + layer; i < part.end - layer; ++i)
      err = std::max(err, std::abs(u[i] - exact(g.x(i))));
  run.report["reference_error" + suffix] = err;
  if (err > tol) run.fail("reference profile error above tolerance");
  if (ref.contains("center_value")) {
    json& cv = ref["center_value"];
    check_keys(cv, {"x", "target", "tolerance"}, "checks.reference.center_value");
    double got = u.eval(cv.at("x"));
    run.report["center_value" + suffix] = got;
    if (std::abs(got - cv.at("target").get<double>()) >
        cv.at("tolerance").get<double>())
      run.fail("center value outside tolerance");
  }
}

void run_dirichlet_one(Run& run, json& cfg, double s_value,
                       const std::string& suffix) {
  json kcfg = cfg.at("kernel");
  kcfg["s"] = s_value;
  Kernel k = parse_kernel(kcfg);
  Grid g = parse_grid(cfg.at("grid"));
  json prob = subst_s(cfg.at("problem"), s_value);
  check_keys(prob, {"domain", "rhs", "exterior"}, "problem");
  auto dom = prob.at("domain").get<std::vector<double>>();
  if (dom.size() != 2) throw std::runtime_error("config: domain needs [a, b]");
  Region omega = Region::open_interval(g, dom[0], dom[1]);
  if (!prob.contains("rhs")) prob["rhs"] = 0.0;
  GridFunction f = GridFunction::constant(g, prob["rhs"]);
  GridFunction gdata = parse_exterior(prob.at("exterior"), g);

  GridFunction u = solve_dirichlet(k, omega, f, gdata);
  write_gridfunction_csv(u, run.path("solution" + suffix + ".csv"));
  if (run.plots)
    write_svg_profile(run.path("profile" + suffix + ".svg"),
                      "Dirichlet solution", {series_of(u, "u")});

  if (!cfg.contains("checks")) return;
  json checks = subst_s(cfg.at("checks"), s_value);
  check_keys(checks, {"reference", "hopf", "expansion", "harmonic_profile"},
             "checks");
  if (checks.contains("reference"))
    check_reference(run, checks["reference"], u, omega, suffix);
  if (checks.contains("harmonic_profile")) {
    // operator residual of the exact s-harmonic profile x_+^s, relative to
    // the local scale x^{-s}
    json& hp = checks["harmonic_profile"];
    check_keys(hp, {"x_min", "x_max", "points", "tolerance"},
               "checks.harmonic_profile");
    double s = k.s();
    GridFunction prof = GridFunction::sample(
        g, [s](double x) { return x > 0 ? std::pow(x, s) : 0.0; },
        ExteriorSide::zero(), ExteriorSide::power(1.0, s));
    OperatorWeights w = make_weights(k, g);
    double x_min = hp.at("x_min"), x_max = hp.at("x_max");
    int points = hp.at("points");
    double worst = 0.0;
    std::vector<std::vector<double>> rows;
    for (int j = 0; j < points; ++j) {
      double x =
          x_min * std::pow(x_max / x_min, (j + 0.5) / points);
      int i = g.nearest(x);
      double rel = std::abs(apply_node(w, prof, i)) * std::pow(g.x(i), s);
      rows.push_back({g.x(i), rel});
      worst = std::max(worst, rel);
    }
    write_table_csv(run.path("harmonic_residual" + suffix + ".csv"),
                    {"x", "relative_residual"}, rows);
    run.report["harmonic_residual" + suffix] = worst;
    if (worst > hp.at("tolerance").get<double>())
      run.fail("harmonic profile residual above tolerance");
  }
  if (checks.contains("hopf")) {
    json& hc = checks["hopf"];
    check_keys(hc, {"min_coefficient"}, "checks.hopf");
    ExponentFit fit = hopf_check(u, omega, k.s());
    run.report["hopf_coefficient" + suffix] = fit.coefficient;
    run.report["hopf_exponent" + suffix] = fit.exponent;
    if (!fit.valid || fit.coefficient <= hc.at("min_coefficient").get<double>())
      run.fail("Hopf coefficient not positive");
  }
  if (checks.contains("expansion")) {
    json& ec = checks["expansion"];
    check_keys(ec,
               {"barrier_window", "projection_cells", "min_remainder_exponent"},
               "checks.expansion");
    if (!ec.contains("barrier_window")) ec["barrier_window"] = 8.0;
    if (!ec.contains("projection_cells")) ec["projection_cells"] = 8;
    HalfSpaceSolution b = build_halfspace_truncated(k, ec["barrier_window"]);
    double z = dom[0], h = g.h();
    GridFunction bo = GridFunction::sample(
        g, [&](double x) { return b.b.eval(x - z); });
    double q = project_on_barrier(u, bo, z, ec["projection_cells"].get<int>() * h);
    std::vector<std::pair<double, double>> samples;
    for (double r = 0.25; r >= 8 * h; r /= std::sqrt(2.0)) {
      double sup = 0.0;
      for (int i : Region::ball(g, z, r).indices())
        sup = std::max(sup, std::abs(u[i] - q * bo[i]));
      samples.emplace_back(r, sup);
    }
    ExponentFit fit = fit_growth(samples);
    run.report["expansion_q" + suffix] = q;
    run.report["expansion_remainder_exponent" + suffix] = fit.exponent;
    std::vector<std::vector<double>> rows;
    for (auto& [r, v] : samples) rows.push_back({r, v});
    write_table_csv(run.path("expansion" + suffix + ".csv"),
                    {"r", "sup_remainder"}, rows);
    if (run.plots)
      write_svg_loglog_fit(run.path("expansion" + suffix + ".svg"),
                           "Boundary expansion remainder", samples, fit);
    if (q <= 0.0 || fit.exponent < ec.at("min_remainder_exponent").get<double>())
      run.fail("boundary expansion remainder below required exponent");
  }
}

void run_dirichlet(Run& run, json& cfg) {
  if (!cfg.at("kernel").contains("n")) cfg["kernel"]["n"] = 1;
  const json& s = cfg.at("kernel").at("s");
  if (s.is_array()) {
    for (const json& sv : s) {
      char suffix[32];
      std::snprintf(suffix, sizeof suffix, "_s%g", sv.get<double>());
      run_dirichlet_one(run, cfg, sv, suffix);
    }
  } else {
    run_dirichlet_one(run, cfg, s, "");
  }
}

// ---------------------------------------------------------------- one-phase

void run_onephase(Run& run, json& cfg) {
  Kernel k = parse_kernel(cfg.at("kernel"));
  Grid g = parse_grid(cfg.at("grid"));
  json& prob = cfg.at("problem");
  check_keys(prob, {"domain", "M", "data"}, "problem");
  auto dom = prob.at("domain").get<std::vector<double>>();
  Region omega = Region::open_interval(g, dom[0], dom[1]);
  GridFunction data = parse_exterior(prob.at("data"), g);

  MinimizerResult res;
  double M = 1.0;
  if (prob.at("M").is_string() && prob.at("M") == "sweep") {
    res = minimize_swept_M(OnePhaseProblem(k, omega, 1.0, data), M);
  } else {
    M = prob.at("M");
    res = minimize_alternating(OnePhaseProblem(k, omega, M, data));
  }
  run.report["M"] = M;
  run.report["energy"] = res.energy.total();
  write_gridfunction_csv(res.u, run.path("solution.csv"));
  {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < res.trace.size(); ++i)
      rows.push_back({double(i), res.trace[i]});
    write_table_csv(run.path("trace.csv"), {"sweep", "energy"}, rows);
  }
  if (run.plots)
    write_svg_profile(run.path("profile.svg"), "One-phase minimizer",
                      {series_of(res.u, "u")});

  // free boundary point: last contact component followed by positivity
  double x0 = 0.0;
  bool have_x0 = false;
  for (const auto& part : res.contact.parts())
    if (res.positivity.contains(part.end)) {
      x0 = g.x(part.end - 1) + g.h() / 2;
      have_x0 = true;
    }
  if (have_x0) run.report["x0"] = x0;

  if (!cfg.contains("checks")) return;
  json& checks = cfg.at("checks");
  check_keys(checks,
             {"certificate_tolerance", "density", "regularity",
              "replacement_identity", "minmax_identity",
              "oracle_equivalence"},
             "checks");

  OnePhaseProblem p(k, omega, M, data);
  if (checks.contains("oracle_equivalence")) {
    json& oe = checks["oracle_equivalence"];
    check_keys(oe, {"energy_tolerance"}, "checks.oracle_equivalence");
    MinimizerResult oracle = minimize_bruteforce_1d(p);
    bool same_contact = oracle.contact.parts().size() ==
                        res.contact.parts().size();
    if (same_contact)
      for (std::size_t i = 0; i < oracle.contact.parts().size(); ++i)
        same_contact = same_contact &&
                       oracle.contact.parts()[i].begin ==
                           res.contact.parts()[i].begin &&
                       oracle.contact.parts()[i].end ==
                           res.contact.parts()[i].end;
    double gap = std::abs(oracle.energy.total() - res.energy.total());
    run.report["oracle_energy_gap"] = gap;
    run.report["oracle_contact_match"] = same_contact;
    run.report["oracle_exhaustive"] = oracle.exhaustive;
    if (!same_contact) run.fail("contact set differs from brute force");
    if (gap > oe.at("energy_tolerance").get<double>())
      run.fail("energy differs from brute force");
  }
  if (checks.contains("certificate_tolerance")) {
    double tol = checks["certificate_tolerance"];
    ResidualCertificate cert = residual_certificate(p, res);
    run.report["max_lu_omega"] = cert.max_lu_omega;
    run.report["max_abs_lu_positivity"] = cert.max_abs_lu_positivity;
    run.report["min_u"] = cert.min_u;
    if (cert.max_lu_omega > tol || cert.max_abs_lu_positivity > tol ||
        cert.min_u < 0.0)
      run.fail("residual certificate violated");
  }
  if (checks.contains("density")) {
    json& dc = checks["density"];
    check_keys(dc, {"radii", "bounds"}, "checks.density");
    if (!have_x0) throw std::runtime_error("one-phase: no free boundary point");
    std::vector<double> radii = parse_radii(dc.at("radii"));
    auto dens = density_report(res, x0, radii);
    auto nd = nondegeneracy_report(res, x0, radii);
    std::vector<std::vector<double>> rows;
    for (auto& d : dens) rows.push_back({d.r, d.ratio, double(d.resolved)});
    write_table_csv(run.path("density.csv"), {"r", "ratio", "resolved"}, rows);
    rows.clear();
    for (auto& [r, q] : nd.sup_ratio) rows.push_back({r, q});
    write_table_csv(run.path("nondegeneracy.csv"), {"r", "sup_over_rs"}, rows);
    run.report["kappa"] = nd.kappa;
    auto bounds = dc.at("bounds").get<std::vector<double>>();
    for (auto& d : dens)
      if (d.resolved && (d.ratio < bounds[0] || d.ratio > bounds[1]))
        run.fail("density ratio outside bounds");
    if (!(nd.kappa > 0.0)) run.fail("non-degeneracy constant not positive");
  }
  if (checks.contains("regularity")) {
    json& rc = checks["regularity"];
    check_keys(rc, {"radii", "target", "tolerance"}, "checks.regularity");
    if (!have_x0) throw std::runtime_error("one-phase: no free boundary point");
    std::vector<double> radii = parse_radii(rc.at("radii"));
    ExponentFit fit = optimal_regularity_report(res, x0, radii);
    run.report["regularity_exponent"] = fit.exponent;
    run.report["regularity_r2"] = fit.r2;
    std::vector<std::pair<double, double>> samples;
    for (double r : radii)
      samples.emplace_back(r, fit.coefficient * std::pow(r, fit.exponent));
    auto nd = nondegeneracy_report(res, x0, radii);
    samples.clear();
    for (auto& [r, q] : nd.sup_ratio)
      samples.emplace_back(r, q * std::pow(r, res.s));
    if (run.plots)
      write_svg_loglog_fit(run.path("regularity.svg"),
                           "sup_{B_r} u growth at the free boundary", samples,
                           fit);
    if (std::abs(fit.exponent - rc.at("target").get<double>()) >
        rc.at("tolerance").get<double>())
      run.fail("regularity exponent outside tolerance");
  }
  if (checks.contains("replacement_identity")) {
    json& ri = checks["replacement_identity"];
    check_keys(ri, {"balls", "tolerance", "random_functions"},
               "checks.replacement_identity");
    double tol = ri.at("tolerance");
    OperatorWeights w = make_weights(k, g);
    std::mt19937_64 rng(run.config.value("seed", 0));
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    int randoms = ri.value("random_functions", 0);
    ri["random_functions"] = randoms;
    double worst_pyth = 0.0, worst_l22 = -1e300;
    for (json& ball : ri.at("balls")) {
      check_keys(ball, {"center", "radius"}, "ball");
      Region B = Region::ball(g, ball.at("center"), ball.at("radius"))
                     .intersect(omega);
      if (B.empty()) continue;
      // Pythagorean identity E(u) = E(v) + E(u-v) for the replacement v,
      // on the minimizer and on seeded random grid functions.
      std::vector<GridFunction> probes{res.u};
      for (int q = 0; q < randoms; ++q) {
        Eigen::VectorXd vals(g.n);
        for (int i = 0; i < g.n; ++i) vals[i] = dist(rng);
        probes.emplace_back(g, vals);
      }
      for (const GridFunction& uq : probes) {
        GridFunction v = harmonic_replacement(w, uq, B);
        GridFunction d(g, uq.values() - v.values());
        double eu = dirichlet_energy(w, uq, B).value();
        double ev = dirichlet_energy(w, v, B).value();
        double ed = dirichlet_energy(w, d, B).value();
        worst_pyth = std::max(worst_pyth,
                              std::abs(eu - ev - ed) / std::max(1.0, eu));
      }
      // Lemma 2.2 energy comparison for the minimizer only.
      GridFunction v = harmonic_replacement(w, res.u, B);
      GridFunction d(g, res.u.values() - v.values());
      double ed = dirichlet_energy(w, d, B).value();
      double measure = M * g.h() * res.contact.intersect(B).count();
      worst_l22 = std::max(worst_l22, ed - measure);
    }
    run.report["pythagorean_defect"] = worst_pyth;
    run.report["energy_comparison_slack"] = -worst_l22;
    if (worst_pyth > tol) run.fail("Pythagorean identity violated");
    if (worst_l22 > tol) run.fail("energy comparison violated");
  }
  if (checks.contains("minmax_identity")) {
    json& mm = checks["minmax_identity"];
    check_keys(mm, {"count", "tolerance"}, "checks.minmax_identity");
    std::uint64_t seed = run.config.value("seed", 0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    double worst = std::abs(minmax_identity_gap(3, 1, 0, 2));
    int count = mm.at("count");
    for (int i = 0; i < count; ++i)
      worst = std::max(worst, std::abs(minmax_identity_gap(
                                  dist(rng), dist(rng), dist(rng), dist(rng))));
    run.report["minmax_worst_gap"] = worst;
    if (worst > mm.at("tolerance").get<double>())
      run.fail("min/max identity violated");
  }
}

// ---------------------------------------------------------------- half-space

void run_halfspace(Run& run, json& cfg) {
  json& kcfg = cfg.at("kernel");
  Kernel k = parse_kernel(kcfg);
  json& prob = cfg.at("problem");
  check_keys(prob, {"route", "R", "nodes_per_unit", "probe_decades"},
             "problem");
  std::string route = prob.value("route", "truncated");
  prob["route"] = route;
  if (!prob.contains("R")) prob["R"] = 16.0;
  if (!prob.contains("nodes_per_unit")) prob["nodes_per_unit"] = 256;
  if (!prob.contains("probe_decades")) prob["probe_decades"] = 6;

  std::vector<HalfSpaceSolution> sols;
  if (route == "truncated" || route == "both")
    sols.push_back(
        build_halfspace_truncated(k, prob["R"], prob["nodes_per_unit"]));
  if (route == "pipeline" || route == "both") {
    PipelineDiagnostics diag;
    sols.push_back(build_halfspace_pipeline(k, &diag));
    run.report["pipeline_levels"] = diag.levels;
    run.report["pipeline_M"] = diag.chosen_M;
  }
  if (sols.empty())
    throw std::runtime_error("config: unknown route '" + route + "'");

  std::vector<SvgSeries> plot;
  for (auto& hs : sols) {
    bool pipeline = hs.route == HalfSpaceRoute::Pipeline;
    std::string tag = pipeline ? "pipeline" : "truncated";
    write_gridfunction_csv(hs.b, run.path("profile_" + tag + ".csv"));
    auto [c1, c2] = derivative_bounds_report(hs);
    run.report["derivative_c1_" + tag] = c1;
    run.report["derivative_c2_" + tag] = c2;
    plot.push_back(series_of(hs.b, "b " + tag));
    QuotientProbe probe =
        quotient_oscillation_probe(hs, prob["probe_decades"]);
    std::vector<std::vector<double>> rows;
    for (auto& [r, q] : probe.samples) rows.push_back({r, q});
    write_table_csv(run.path("quotient_" + tag + ".csv"),
                    {"r", "quotient"}, rows);
    run.report["quotient_amplitude_" + tag] = probe.amplitude;
  }
  if (run.plots)
    write_svg_profile(run.path("profile.svg"), "Half-space solution", plot);

  if (!cfg.contains("checks")) return;
  json& checks = cfg.at("checks");
  check_keys(checks,
             {"reference_power", "route_agreement", "growth_exponent",
              "reduction", "derivative_positive"},
             "checks");
  if (checks.contains("reference_power")) {
    json& rp = checks["reference_power"];
    check_keys(rp, {"tolerance"}, "checks.reference_power");
    double s = k.s(), worst = 0.0;
    for (auto& hs : sols) {
      double err = 0.0;
      for (int i = 0; i <= 400; ++i) {
        double x = i / 400.0;
        err = std::max(err, std::abs(hs.b.eval(x) - std::pow(x, s)));
      }
      worst = std::max(worst, err);
    }
    run.report["profile_error"] = worst;
    if (worst > rp.at("tolerance").get<double>())
      run.fail("profile deviates from x_+^s");
  }
  if (checks.contains("route_agreement")) {
    if (sols.size() != 2)
      throw std::runtime_error("config: route_agreement needs route = both");
    double tol = checks["route_agreement"];
    double d = 0.0;
    for (int i = 0; i <= 400; ++i) {
      double x = i / 400.0;
      d = std::max(d, std::abs(sols[0].b.eval(x) - sols[1].b.eval(x)));
    }
    run.report["route_agreement"] = d;
    if (d > tol) run.fail("construction routes disagree");
  }
  if (checks.contains("growth_exponent")) {
    json& ge = checks["growth_exponent"];
    check_keys(ge, {"radii", "target", "tolerance"}, "checks.growth_exponent");
    std::vector<double> radii = parse_radii(ge.at("radii"));
    for (auto& hs : sols) {
      ExponentFit fit = fit_growth_at(hs.b, 0.0, radii);
      bool pipeline = hs.route == HalfSpaceRoute::Pipeline;
      run.report[pipeline ? "growth_exponent_pipeline"
                          : "growth_exponent_truncated"] = fit.exponent;
      if (std::abs(fit.exponent - ge.at("target").get<double>()) >
          ge.at("tolerance").get<double>())
        run.fail("growth exponent outside tolerance");
    }
  }
  if (checks.contains("derivative_positive") &&
      checks["derivative_positive"].get<bool>()) {
    for (auto& hs : sols) {
      auto [c1, c2] = derivative_bounds_report(hs);
      if (!(c1 > 0.0 && std::isfinite(c2))) run.fail("derivative bounds fail");
    }
  }
  if (checks.contains("reduction")) {
    json& rd = checks["reduction"];
    check_keys(rd, {"tolerance", "c0_target", "c0_tolerance"},
               "checks.reduction");
    double c0 = reduction_constant(2, k.s());
    run.report["c0"] = c0;
    if (rd.contains("c0_target") &&
        std::abs(c0 - rd["c0_target"].get<double>()) >
            rd.at("c0_tolerance").get<double>())
      run.fail("reduction constant outside tolerance");
    Kernel k2 = parse_kernel(kcfg, 2);
    Kernel k1 = reduce_to_1d(k2);
    const HalfSpaceSolution& hs = sols.front();
    auto profile = [&](double t) {
      return hs.b.eval(t) * std::exp(-t * t / 9.0);
    };
    double tol = rd.at("tolerance");
    double worst = 0.0;
    for (double x : {0.4, 0.9}) {
      double l1 = apply_callable(k1, profile, x);
      double l2 = apply_callable_2d(k2, profile, x, 1e-8);
      worst = std::max(worst, std::abs(l1 - l2) / std::abs(l2));
    }
    run.report["reduction_relative_error"] = worst;
    if (worst > tol) run.fail("dimensional reduction inconsistency");
  }
}

// ----------------------------------------------------------------- obstacle

void run_obstacle(Run& run, json& cfg) {
  Kernel k = parse_kernel(cfg.at("kernel"));
  Grid g = parse_grid(cfg.at("grid"));
  json& prob = cfg.at("problem");
  check_keys(prob, {"obstacle"}, "problem");
  json& ob = prob.at("obstacle");
  check_keys(ob, {"type", "radius", "height"}, "problem.obstacle");
  if (ob.at("type") != "quartic_bump")
    throw std::runtime_error("config: unknown obstacle type");
  if (!ob.contains("radius")) ob["radius"] = 0.5;
  if (!ob.contains("height")) ob["height"] = 1.0;
  double rad = ob["radius"], height = ob["height"];
  GridFunction phi = GridFunction::sample(g, [&](double x) {
    double q = 1.0 - (x / rad) * (x / rad);
    return q > 0.0 ? height * q * q : 0.0;
  });

  ObstacleResult res = solve_obstacle(ObstacleProblem(k, phi));
  run.report["complementarity_residual"] = res.comp_residual;
  run.report["outer_iterations"] = res.outer_iterations;
  write_gridfunction_csv(res.u, run.path("solution.csv"));
  {
    std::vector<std::vector<double>> rows;
    for (double x : res.free_boundary) rows.push_back({x});
    write_table_csv(run.path("contact.csv"), {"free_boundary_x"}, rows);
  }
  if (run.plots)
    write_svg_profile(run.path("profile.svg"), "Obstacle problem",
                      {series_of(res.u, "u"), series_of(phi, "phi")});

  if (!cfg.contains("checks")) return;
  json& checks = cfg.at("checks");
  check_keys(checks,
             {"complementarity_tolerance", "symmetry_tolerance",
              "classification", "expansion", "regularity"},
             "checks");
  if (checks.contains("complementarity_tolerance")) {
    if (res.comp_residual > checks["complementarity_tolerance"].get<double>() ||
        res.min_excess < 0.0)
      run.fail("complementarity residual above tolerance");
  }
  if (checks.contains("symmetry_tolerance")) {
    double sym = 0.0;
    for (int i = 0; i < g.n; ++i)
      sym = std::max(sym, std::abs(res.u[i] - res.u[g.n - 1 - i]));
    run.report["symmetry_defect"] = sym;
    if (sym > checks["symmetry_tolerance"].get<double>())
      run.fail("solution not symmetric");
  }
  if (checks.contains("classification")) {
    json& cc = checks["classification"];
    check_keys(cc, {"radii", "expected", "target_exponent", "tolerance"},
               "checks.classification");
    std::vector<double> radii = parse_radii(cc.at("radii"));
    std::vector<std::vector<double>> rows;
    for (double x0 : res.free_boundary) {
      auto [cls, fit] = classify_free_boundary_point(res, x0, radii);
      bool regular = cls == FreeBoundaryClass::Regular;
      rows.push_back({x0, double(regular), fit.exponent, fit.coefficient,
                      fit.r2});
      if (cc.contains("expected") &&
          regular != (cc["expected"] == "regular"))
        run.fail("free boundary classification mismatch");
      if (cc.contains("target_exponent") &&
          std::abs(fit.exponent - cc["target_exponent"].get<double>()) >
              cc.at("tolerance").get<double>())
        run.fail("classification exponent outside tolerance");
    }
    write_table_csv(run.path("classification.csv"),
                    {"x0", "regular", "exponent", "coefficient", "r2"}, rows);
  }
  if (checks.contains("expansion")) {
    json& ec = checks["expansion"];
    check_keys(ec, {"barrier_window", "min_remainder_exponent", "min_c"},
               "checks.expansion");
    if (!ec.contains("barrier_window")) ec["barrier_window"] = 8.0;
    HalfSpaceSolution b = build_halfspace_truncated(k, ec["barrier_window"]);
    std::vector<std::vector<double>> rows;
    for (double x0 : res.free_boundary) {
      auto [c, fit] = expansion_fit(res, x0, b);
      rows.push_back({x0, c, fit.exponent, fit.r2});
      if (!(c > ec.value("min_c", 0.0))) run.fail("expansion coefficient");
      if (fit.exponent < ec.at("min_remainder_exponent").get<double>())
        run.fail("expansion remainder exponent too small");
    }
    write_table_csv(run.path("expansion.csv"),
                    {"x0", "c", "remainder_exponent", "r2"}, rows);
  }
  if (checks.contains("regularity")) {
    json& rc = checks["regularity"];
    check_keys(rc, {"min_alpha", "max_alpha"}, "checks.regularity");
    ExponentFit fit = obstacle_regularity_report(res);
    run.report["holder_alpha"] = fit.exponent;
    if (fit.exponent < rc.at("min_alpha").get<double>() ||
        fit.exponent > rc.value("max_alpha", 1.0))
      run.fail("u' Hoelder exponent outside range");
  }
}

// -------------------------------------------------------------------- beta0

void run_beta0(Run& run, json& cfg) {
  json& prob = cfg.at("problem");
  check_keys(prob, {"cases", "tol_beta"}, "problem");
  if (!prob.contains("tol_beta")) prob["tol_beta"] = 1e-4;
  double tol_beta = prob["tol_beta"];
  std::vector<std::vector<double>> rows;
  for (json& c : prob.at("cases")) {
    check_keys(c, {"s", "lam", "Lam", "target", "tolerance", "bracket_margin",
                   "below_s"},
               "beta0 case");
    double s = c.at("s"), lam = c.at("lam"), Lam = c.at("Lam");
    double b = beta0(lam, Lam, s, tol_beta);
    rows.push_back({s, lam, Lam, b});
    if (c.contains("target") &&
        std::abs(b - c["target"].get<double>()) >
            c.at("tolerance").get<double>())
      run.fail("beta0 outside target tolerance");
    if (c.contains("bracket_margin")) {
      double m = c["bracket_margin"];
      if (b <= std::max(0.0, 2 * s - 1) + m || b >= std::min(1.0, 2 * s) - m)
        run.fail("beta0 outside the open bracket");
    }
    if (c.value("below_s", false) && b > s + tol_beta)
      run.fail("beta0 above s");
  }
  write_table_csv(run.path("beta0.csv"), {"s", "lam", "Lam", "beta0"}, rows);
}

// ------------------------------------------------------------- fit-exponent

void run_fit_exponent(Run& run, json& cfg) {
  json& prob = cfg.at("problem");
  check_keys(prob, {"samples"}, "problem");
  std::vector<std::pair<double, double>> samples;
  for (auto& pair : prob.at("samples"))
    samples.emplace_back(pair.at(0), pair.at(1));
  ExponentFit fit = fit_growth(samples);
  run.report["exponent"] = fit.exponent;
  run.report["coefficient"] = fit.coefficient;
  run.report["r2"] = fit.r2;
  write_table_csv(run.path("fit.csv"),
                  {"exponent", "coefficient", "r2", "r_min", "r_max",
                   "samples", "dropped"},
                  {{fit.exponent, fit.coefficient, fit.r2, fit.r_min,
                    fit.r_max, double(fit.samples), double(fit.dropped)}});
  if (run.plots)
    write_svg_loglog_fit(run.path("loglog.svg"), "Exponent fit", samples, fit);
  if (cfg.contains("checks")) {
    json& checks = cfg.at("checks");
    check_keys(checks, {"target", "tolerance"}, "checks");
    if (std::abs(fit.exponent - checks.at("target").get<double>()) >
        checks.at("tolerance").get<double>())
      run.fail("fitted exponent outside tolerance");
  }
}

// ------------------------------------------------------------ reduce-kernel

void run_reduce_kernel(Run& run, json& cfg) {
  Kernel k2 = parse_kernel(cfg.at("kernel"));
  if (k2.dim() != 2)
    throw std::runtime_error("config: reduce-kernel needs a 2D kernel");
  json& prob = cfg.at("problem");
  check_keys(prob, {"t_min", "t_max", "count"}, "problem");
  double t0 = prob.at("t_min"), t1 = prob.at("t_max");
  int count = prob.at("count");
  Kernel k1 = reduce_to_1d(k2);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < count; ++i) {
    double t = t0 * std::pow(t1 / t0, i / double(count - 1));
    rows.push_back({t, k1.density(t), k1.envelope(t)});
  }
  write_table_csv(run.path("kernel1d.csv"), {"t", "density", "envelope"},
                  rows);
  double c0 = reduction_constant(2, k2.s());
  run.report["c0"] = c0;
  if (cfg.contains("checks")) {
    json& checks = cfg.at("checks");
    check_keys(checks, {"c0_target", "c0_tolerance"}, "checks");
    if (std::abs(c0 - checks.at("c0_target").get<double>()) >
        checks.at("c0_tolerance").get<double>())
      run.fail("reduction constant outside tolerance");
  }
}

}  // namespace

int run_experiment(const std::string& config_path, const std::string& out_dir,
                   bool verbose) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("config: cannot open " + config_path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config: parse error: ") + e.what());
  }
  check_keys(cfg,
             {"subcommand", "kernel", "grid", "problem", "checks", "seed",
              "plots"},
             "config");
  std::string sub = cfg.at("subcommand");
  if (!cfg.contains("seed")) cfg["seed"] = 0;
  if (!cfg.contains("plots")) cfg["plots"] = true;

  std::filesystem::create_directories(out_dir);
  Run run;
  run.dir = out_dir;
  run.verbose = verbose;
  run.plots = cfg["plots"];
  run.config = cfg;

  auto t0 = std::chrono::steady_clock::now();
  if (sub == "solve-dirichlet") run_dirichlet(run, cfg);
  else if (sub == "one-phase") run_onephase(run, cfg);
  else if (sub == "half-space") run_halfspace(run, cfg);
  else if (sub == "obstacle") run_obstacle(run, cfg);
  else if (sub == "beta0") run_beta0(run, cfg);
  else if (sub == "fit-exponent") run_fit_exponent(run, cfg);
  else if (sub == "reduce-kernel") run_reduce_kernel(run, cfg);
  else throw std::runtime_error("config: unknown subcommand '" + sub + "'");
  auto t1 = std::chrono::steady_clock::now();

  json manifest;
  manifest["subcommand"] = sub;
  manifest["version"] = kVersion;
  manifest["config"] = cfg;  // resolved: defaults were written back
  manifest["wall_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  manifest["outputs"] = run.outputs;
  manifest["report"] = run.report;
  manifest["pass"] = run.failures.empty();
  manifest["failures"] = run.failures;
  std::ofstream mo(out_dir + "/manifest.json");
  mo << manifest.dump(2) << '\n';

  if (verbose)
    std::printf("%s: %s (%lld ms)\n", sub.c_str(),
                run.failures.empty() ? "pass" : "FAIL",
                static_cast<long long>(manifest["wall_ms"].get<long long>()));
  for (const std::string& f : run.failures)
    std::fprintf(stderr, "predicate failed: %s\n", f.c_str());
  return run.failures.empty() ? 0 : 2;
}

}  // namespace nlfb
