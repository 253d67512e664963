#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace translab::num {

// Wrap an angle to (-pi, pi].
double wrap_pi(double x);
// Wrap an angle to [0, 2*pi).
double wrap_2pi(double x);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // unbiased, n-1

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

// Ordinary least squares of y on x; slope_stderr from the residual variance.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// SplitMix64 step, used to derive independent per-member seeds from a base
// seed so that ensemble runs are reproducible under any execution order.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Deterministic parallel map: runs fn(i) for i in [0, n) on a small thread
// pool; results are aggregated by index by the caller, so scheduling order
// never leaks into outputs.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Centered moving average of odd window w, zero phase, replicate padding.
std::vector<double> moving_average(const std::vector<double>& xs, std::size_t window, int passes);

}  // namespace translab::num
