#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "ablmc/coupling.hpp"

namespace ablmc {

/// Thrown when more than 0.01% of a run's samples fail with unstable steps.
/// Silent exclusion of more than that would bias the estimators.
class SampleFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-level running sums of the multilevel differences Y_l (component-wise
/// for vector quantities of interest).
struct LevelStats {
  int level = 0;
  double h = 0.0;
  std::size_t dim = 1;
  std::vector<double> sum_y, sum_y2;
  std::int64_t n = 0;          ///< successful samples
  std::int64_t failed = 0;     ///< excluded unstable samples
  std::int64_t cost_steps = 0;  ///< integrator steps consumed

  void init(int level_, double h_, std::size_t dim_) {
    level = level_;
    h = h_;
    dim = dim_;
    sum_y.assign(dim, 0.0);
    sum_y2.assign(dim, 0.0);
    n = failed = cost_steps = 0;
  }

  std::int64_t attempts() const { return n + failed; }

  void add(std::span<const double> y, std::int64_t steps) {
    for (std::size_t i = 0; i < dim; ++i) {
      sum_y[i] += y[i];
      sum_y2[i] += y[i] * y[i];
    }
    ++n;
    cost_steps += steps;
  }

  void merge(const LevelStats& o) {
    for (std::size_t i = 0; i < dim; ++i) {
      sum_y[i] += o.sum_y[i];
      sum_y2[i] += o.sum_y2[i];
    }
    n += o.n;
    failed += o.failed;
    cost_steps += o.cost_steps;
  }

  double mean(std::size_t i = 0) const { return sum_y[i] / double(n); }

  double variance(std::size_t i = 0) const {
    if (n < 2) return 0.0;
    const double m = sum_y[i] / double(n);
    return std::max(0.0, (sum_y2[i] - double(n) * m * m) / double(n - 1));
  }

  double max_variance() const {
    double v = 0.0;
    for (std::size_t i = 0; i < dim; ++i) v = std::max(v, variance(i));
    return v;
  }

  double max_abs_mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < dim; ++i) m = std::max(m, std::abs(mean(i)));
    return m;
  }

  double std_error(std::size_t i = 0) const {
    return n > 0 ? std::sqrt(variance(i) / double(n)) : 0.0;
  }
};

using SampleFn =
    std::function<SampleOutcome(std::int64_t, std::span<double>, std::span<double>)>;

/// Adds `count` samples with indices [first, first+count) to `acc`.
/// Samples are grouped into fixed blocks whose partial sums are merged in
/// block order, so the result is bit-identical for any worker count.
inline void accumulate_samples(LevelStats& acc, std::int64_t first,
                               std::int64_t count, int workers,
                               const SampleFn& fn) {
  if (count <= 0) return;
  constexpr std::int64_t block_size = 4096;
  const std::int64_t n_blocks = (count + block_size - 1) / block_size;
  workers = std::clamp<std::int64_t>(workers, 1, n_blocks);

  std::vector<LevelStats> parts(static_cast<std::size_t>(n_blocks));
  const auto run_block = [&](std::int64_t b, std::vector<double>& y,
                             std::vector<double>& scratch) {
    LevelStats& part = parts[std::size_t(b)];
    part.init(acc.level, acc.h, acc.dim);
    const std::int64_t lo = first + b * block_size;
    const std::int64_t hi = std::min(first + count, lo + block_size);
    for (std::int64_t idx = lo; idx < hi; ++idx) {
      const SampleOutcome out = fn(idx, y, scratch);
      if (out.ok)
        part.add(y, out.steps);
      else
        ++part.failed;
    }
  };

  if (workers <= 1) {
    std::vector<double> y(acc.dim), scratch(acc.dim);
    for (std::int64_t b = 0; b < n_blocks; ++b) run_block(b, y, scratch);
  } else {
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        std::vector<double> y(acc.dim), scratch(acc.dim);
        for (std::int64_t b; (b = next.fetch_add(1)) < n_blocks;)
          run_block(b, y, scratch);
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& part : parts) acc.merge(part);
}

/// Aborts the run once failures exceed 0.01% of attempted samples.
inline void check_failure_budget(const LevelStats& acc) {
  if (acc.failed > 0 && double(acc.failed) > 1e-4 * double(acc.attempts()))
    throw SampleFailureError("more than 0.01% of samples failed on level " +
                             std::to_string(acc.level));
}

}  // namespace ablmc
