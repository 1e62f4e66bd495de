#pragma once

#include <cstddef>
#include <functional>
#include <vector>

// Threading helpers. Reductions use a fixed block decomposition so results
// are bit-identical for any thread count (and identical to running the same
// blocked loop serially).
namespace bbl::par {

// Number of worker threads (BBL_THREADS env var, else OpenMP default).
int threads();
void set_threads(int n);

inline constexpr std::size_t kBlock = 512;

// Parallel for over [0, n).
void for_each(std::size_t n, const std::function<void(std::size_t)>& fn);

// Deterministic blocked sum: per-block partial sums accumulated in index
// order, block results combined in block order. Thread-count independent.
double block_sum(std::size_t n, const std::function<double(std::size_t)>& fn);

// Plain serial accumulation, kept as the reference path for tests/benchmarks.
double serial_sum(std::size_t n, const std::function<double(std::size_t)>& fn);

// Deterministic blocked max of |f(i)|.
double block_max_abs(std::size_t n, const std::function<double(std::size_t)>& fn);

}  // namespace bbl::par
