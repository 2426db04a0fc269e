#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "nlfb/dirichlet.hpp"
#include "nlfb/meshops.hpp"

// Times the OpenMP execution policy against the serial reference on the
// hottest paths: weight application over a region, dense collocation
// assembly, and a full Dirichlet solve. Results must agree bitwise (the
// summation order is fixed); the residual column certifies that.
using namespace nlfb;
using clock_type = std::chrono::steady_clock;

namespace {

template <typename F>
double time_ms(F&& f, int reps) {
  auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) f();
  auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 4001;
  int reps = argc > 2 ? std::atoi(argv[2]) : 3;

  Kernel k = oscillating_kernel(1, 0.5, 1.0, 2.0, 3.0);
  Grid g(-2.0, 2.0, n);
  Region omega = Region::open_interval(g, -1.0, 1.0);
  GridFunction u = GridFunction::sample(
      g, [](double x) { return std::exp(-x * x); });
  GridFunction f = GridFunction::constant(g, 1.0);
  GridFunction bc = GridFunction::constant(g, 0.0);
  OperatorWeights w = make_weights(k, g);

  std::printf("n = %d nodes, %d reps per row\n", n, reps);
  std::printf("%-22s %12s %12s %9s %12s\n", "task", "serial ms", "openmp ms",
              "speedup", "max |diff|");

  {
    Eigen::VectorXd rs, rp;
    double ts = time_ms([&] { rs = apply_region(w, u, omega, Exec::Serial); },
                        reps);
    double tp = time_ms(
        [&] { rp = apply_region(w, u, omega, Exec::Parallel); }, reps);
    std::printf("%-22s %12.2f %12.2f %8.2fx %12.3g\n", "apply_region", ts, tp,
                ts / tp, (rs - rp).cwiseAbs().maxCoeff());
  }
  {
    Eigen::MatrixXd As, Ap;
    double ts = time_ms([&] { As = collocation_matrix(w, Exec::Serial); },
                        reps);
    double tp = time_ms([&] { Ap = collocation_matrix(w, Exec::Parallel); },
                        reps);
    std::printf("%-22s %12.2f %12.2f %8.2fx %12.3g\n", "collocation_matrix",
                ts, tp, ts / tp, (As - Ap).cwiseAbs().maxCoeff());
  }
  {
    GridFunction us, up;
    double ts = time_ms(
        [&] { us = solve_dirichlet(k, omega, f, bc, Exec::Serial); }, reps);
    double tp = time_ms(
        [&] { up = solve_dirichlet(k, omega, f, bc, Exec::Parallel); }, reps);
    std::printf("%-22s %12.2f %12.2f %8.2fx %12.3g\n", "solve_dirichlet", ts,
                tp, ts / tp, (us.values() - up.values()).cwiseAbs().maxCoeff());
  }
  {
    double ss = 0, sp = 0;
    double ts = time_ms(
        [&] { ss = hs_seminorm(u, 0.5, omega, omega, Exec::Serial); }, reps);
    double tp = time_ms(
        [&] { sp = hs_seminorm(u, 0.5, omega, omega, Exec::Parallel); }, reps);
    std::printf("%-22s %12.2f %12.2f %8.2fx %12.3g\n", "hs_seminorm", ts, tp,
                ts / tp, std::abs(ss - sp));
  }
  return 0;
}
