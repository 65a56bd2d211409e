#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <omp.h>

#include "expins/errors.hpp"

namespace expins {

/// Execution settings handed down from the CLI. The worker count is always a
/// declared value; results never depend on it (work is split into fixed-size
/// blocks, each with its own RNG stream, and reduced in block order).
struct ExecConfig {
  int workers = 1;
};

/// Default number of Monte-Carlo draws per block.
inline constexpr std::size_t kBlockSize = 4096;

inline std::size_t block_count(std::size_t n, std::size_t block = kBlockSize) {
  return (n + block - 1) / block;
}

/// Serial reference: out[i] = f(i) for i in [0, count).
template <class F>
auto map_indexed_serial(std::size_t count, F&& f) {
  using R = decltype(f(std::size_t{}));
  std::vector<R> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
  return out;
}

/// OpenMP kernel with the same contract as map_indexed_serial. Each index is
/// evaluated independently, so the output is identical to the serial one.
template <class F>
auto map_indexed_omp(std::size_t count, int workers, F&& f) {
  using R = decltype(f(std::size_t{}));
  std::vector<R> out(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for num_threads(workers) schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
  return out;
}

template <class F>
auto map_indexed(std::size_t count, const ExecConfig& exec, F&& f) {
  if (exec.workers < 1) throw ValidationError("worker count must be >= 1");
  if (exec.workers == 1) return map_indexed_serial(count, std::forward<F>(f));
  return map_indexed_omp(count, exec.workers, std::forward<F>(f));
}

/// Streaming mean/variance (Welford) with an order-dependent but deterministic
/// merge (Chan et al.).
struct RunningStats {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const RunningStats& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.n) / total;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }

  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double std_error() const { return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

}  // namespace expins
