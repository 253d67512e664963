#include "translab/numeric.hpp"

#include <cmath>
#include <future>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace translab::num {

double wrap_pi(double x) {
  constexpr double tau = 2.0 * std::numbers::pi;
  double r = std::fmod(x, tau);
  if (r <= -std::numbers::pi) r += tau;
  if (r > std::numbers::pi) r -= tau;
  return r;
}

double wrap_2pi(double x) {
  constexpr double tau = 2.0 * std::numbers::pi;
  double r = std::fmod(x, tau);
  if (r < 0.0) r += tau;
  if (r >= tau) r -= tau;
  return r;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty input");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("variance: need at least 2 samples");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 matching points");
  const auto n = static_cast<double>(x.size());
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (f.intercept + f.slope * x[i]);
      ss_res += r * r;
    }
    f.slope_stderr = std::sqrt(ss_res / (n - 2.0) / sxx);
  }
  return f;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<double> moving_average(const std::vector<double>& xs, std::size_t window, int passes) {
  if (window % 2 == 0 || window == 0) throw std::invalid_argument("moving_average: window must be odd");
  if (xs.empty()) return xs;
  std::vector<double> cur = xs;
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
  const auto h = static_cast<std::ptrdiff_t>(window / 2);
  std::vector<double> nxt(xs.size());
  for (int p = 0; p < passes; ++p) {
    // prefix sums with replicate padding
    double acc = 0.0;
    std::vector<double> pre(xs.size() + 1, 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      acc += cur[static_cast<std::size_t>(i)];
      pre[static_cast<std::size_t>(i + 1)] = acc;
    }
    auto range_sum = [&](std::ptrdiff_t lo, std::ptrdiff_t hi) {  // inclusive, clamped
      double s = 0.0;
      if (lo < 0) {
        s += cur.front() * static_cast<double>(-lo);
        lo = 0;
      }
      if (hi > n - 1) {
        s += cur.back() * static_cast<double>(hi - (n - 1));
        hi = n - 1;
      }
      s += pre[static_cast<std::size_t>(hi + 1)] - pre[static_cast<std::size_t>(lo)];
      return s;
    };
    for (std::ptrdiff_t i = 0; i < n; ++i)
      nxt[static_cast<std::size_t>(i)] = range_sum(i - h, i + h) / static_cast<double>(window);
    std::swap(cur, nxt);
  }
  return cur;
}

}  // namespace translab::num
