#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>

namespace bethe {

// Resolves a worker count: explicit request > BETHE_LAB_THREADS > hardware.
int resolve_threads(int requested);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Callers must write
// per-index results into pre-assigned slots; any reduction happens afterwards
// in index order, so the outcome is independent of the worker count.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn);

// Neumaier compensated summation. Deterministic for a fixed operand order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_total(std::span<const double> xs);

// Mean and standard error of the mean (compensated, index order).
struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};
MeanStderr mean_stderr(std::span<const double> xs);

}  // namespace bethe
