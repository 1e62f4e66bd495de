// Timing comparison of the serial reference paths against the OpenMP kernels:
// quadrature reduction, FD stepping, residual sample sweeps.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "bbl/par.hpp"
#include "bbl/profiles.hpp"
#include "bbl/simulator.hpp"

namespace {

using clock_t_ = std::chrono::steady_clock;

double seconds_since(clock_t_::time_point t0) {
  return std::chrono::duration<double>(clock_t_::now() - t0).count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int k = 0; k < reps; ++k) {
    auto t0 = clock_t_::now();
    f();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

void bench_reduction() {
  const std::size_t n = 1 << 22;
  auto f = [](std::size_t i) {
    const double x = 1e-6 * static_cast<double>(i);
    return std::exp(-x) * std::sin(x);
  };
  volatile double sink = 0.0;
  const double ts = time_best_of(3, [&] { sink = bbl::par::serial_sum(n, f); });
  const double tp = time_best_of(3, [&] { sink = bbl::par::block_sum(n, f); });
  const double serial = bbl::par::serial_sum(n, f);
  const double parallel = bbl::par::block_sum(n, f);
  std::printf("%-28s serial %8.2f ms   omp %8.2f ms   speedup %5.2fx   |gap| %.3g\n",
              "blocked reduction (4M)", 1e3 * ts, 1e3 * tp, ts / tp,
              std::abs(serial - parallel) / std::abs(serial));
  (void)sink;
}

void bench_quadrature() {
  auto grid = bbl::QuadratureGrid::build(60.0, 60.0, 16, true, 5);
  auto Uf = bbl::sample_U(grid);
  volatile double sink = 0.0;
  const int nt = bbl::par::threads();
  const double tq = time_best_of(3, [&] { sink = bbl::quadform_BU(Uf, Uf); });
  bbl::par::set_threads(1);
  const double tq1 = time_best_of(3, [&] { sink = bbl::quadform_BU(Uf, Uf); });
  bbl::par::set_threads(nt);
  std::printf("%-28s 1 thread %7.2f ms   omp %8.2f ms   speedup %5.2fx\n", "B_U quadrature",
              1e3 * tq1, 1e3 * tq, tq1 / tq);
  (void)sink;
}

void bench_stepper() {
  bbl::sim::CylGrid grid;
  grid.nr = 192;
  grid.nz = 192;
  grid.r_max = 1.0;
  grid.h_max = 1.0;
  bbl::sim::SolverState s;
  s.grid = grid;
  s.u.assign(static_cast<std::size_t>(grid.nr) * grid.nz, 0.0);
  for (int i = 0; i < grid.nr; ++i)
    for (int j = 0; j < grid.nz; ++j) {
      const double r = i * grid.dr(), z = j * grid.dz();
      s.at(i, j) = -0.2 * std::exp(-8.0 * (r * r + z * z));
    }
  s.dt = bbl::sim::stable_dt(s);
  auto s1 = s, s2 = s;
  const double tser = time_best_of(3, [&] {
    for (int k = 0; k < 200; ++k) bbl::sim::step_serial(s1);
  });
  const double tpar = time_best_of(3, [&] {
    for (int k = 0; k < 200; ++k) bbl::sim::step(s2);
  });
  double gap = 0.0;
  for (std::size_t k = 0; k < s1.u.size(); ++k) gap = std::max(gap, std::abs(s1.u[k] - s2.u[k]));
  std::printf("%-28s serial %8.2f ms   omp %8.2f ms   speedup %5.2fx   |gap| %.3g\n",
              "FD stepper (192^2 x 200)", 1e3 * tser, 1e3 * tpar, tser / tpar, gap);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", bbl::par::threads());
  bench_reduction();
  bench_quadrature();
  bench_stepper();
  return 0;
}
