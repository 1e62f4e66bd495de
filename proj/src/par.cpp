#include "bbl/par.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace bbl::par {

namespace {
int g_threads = [] {
  if (const char* env = std::getenv("BBL_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return omp_get_max_threads();
}();
}  // namespace

int threads() { return g_threads; }

void set_threads(int n) {
  if (n > 0) g_threads = n;
}

void for_each(std::size_t n, const std::function<void(std::size_t)>& fn) {
#pragma omp parallel for schedule(static) num_threads(g_threads)
  for (long long i = 0; i < static_cast<long long>(n); ++i) fn(static_cast<std::size_t>(i));
}

double block_sum(std::size_t n, const std::function<double(std::size_t)>& fn) {
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static) num_threads(g_threads)
  for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += fn(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

double serial_sum(std::size_t n, const std::function<double(std::size_t)>& fn) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += fn(i);
  return s;
}

double block_max_abs(std::size_t n, const std::function<double(std::size_t)>& fn) {
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static) num_threads(g_threads)
  for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, std::abs(fn(i)));
    partial[static_cast<std::size_t>(b)] = m;
  }
  double total = 0.0;
  for (double m : partial) total = std::max(total, m);
  return total;
}

}  // namespace bbl::par
