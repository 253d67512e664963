#include <doctest.h>

#include <complex>
#include <random>

#include "translab/fft.hpp"

using translab::fft::cvec;

namespace {

cvec random_signal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  cvec v(n);
  for (auto& z : v) z = {uni(rng), uni(rng)};
  return v;
}

double max_diff(const cvec& a, const cvec& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("forward transform matches the reference DFT") {
  for (const std::size_t n : {2ul, 8ul, 16ul, 64ul, 31ul, 100ul, 243ul}) {
    const auto x = random_signal(n, 11 + n);
    const auto fast = translab::fft::forward(x);
    const auto slow = translab::fft::dft_reference(x, false);
    CAPTURE(n);
    CHECK(max_diff(fast, slow) < 1e-9);
  }
}

TEST_CASE("inverse undoes forward") {
  for (const std::size_t n : {4ul, 128ul, 1024ul, 77ul}) {
    const auto x = random_signal(n, n);
    const auto back = translab::fft::inverse(translab::fft::forward(x));
    CHECK(max_diff(back, x) < 1e-11);
  }
}

TEST_CASE("Parseval identity") {
  const auto x = random_signal(512, 3);
  const auto spec = translab::fft::forward(x);
  double time_sum = 0.0, freq_sum = 0.0;
  for (const auto& z : x) time_sum += std::norm(z);
  for (const auto& z : spec) freq_sum += std::norm(z);
  CHECK(std::abs(time_sum - freq_sum / 512.0) < 1e-10 * time_sum);
}

TEST_CASE("pure tone concentrates on one bin") {
  const std::size_t n = 256;
  cvec x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = std::polar(1.0, 2.0 * 3.14159265358979312 * 5.0 * static_cast<double>(i) / n);
  const auto spec = translab::fft::forward(x);
  CHECK(std::abs(spec[5]) == doctest::Approx(static_cast<double>(n)).epsilon(1e-9));
  for (std::size_t k = 0; k < n; ++k)
    if (k != 5) CHECK(std::abs(spec[k]) < 1e-8);
}

TEST_CASE("empty input is rejected") {
  cvec x;
  CHECK_THROWS_AS(translab::fft::transform(x, false), std::invalid_argument);
}
