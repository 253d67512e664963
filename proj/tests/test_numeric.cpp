#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <vector>

#include "translab/numeric.hpp"

namespace num = translab::num;

TEST_CASE("angle wrapping") {
  CHECK(num::wrap_pi(0.0) == 0.0);
  CHECK(num::wrap_pi(3.5 * std::numbers::pi) == doctest::Approx(-0.5 * std::numbers::pi));
  CHECK(num::wrap_pi(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(num::wrap_2pi(-0.5) == doctest::Approx(2.0 * std::numbers::pi - 0.5));
  for (double x = -20.0; x < 20.0; x += 0.37) {
    CHECK(std::abs(num::wrap_pi(x)) <= std::numbers::pi + 1e-12);
    CHECK(num::wrap_2pi(x) >= 0.0);
    CHECK(num::wrap_2pi(x) < 2.0 * std::numbers::pi);
    CHECK(std::abs(std::sin(num::wrap_pi(x)) - std::sin(x)) < 1e-12);
  }
}

TEST_CASE("line fit recovers an exact line") {
  std::vector<double> x, y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(0.5 * i);
    y.push_back(3.0 - 2.0 * x.back());
  }
  const auto fit = num::fit_line(x, y);
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.slope_stderr < 1e-10);
}

TEST_CASE("line fit input validation") {
  std::vector<double> one = {1.0};
  CHECK_THROWS_AS(num::fit_line(one, one), std::invalid_argument);
  std::vector<double> same = {2.0, 2.0, 2.0};
  CHECK_THROWS_AS(num::fit_line(same, same), std::invalid_argument);
}

TEST_CASE("derived seeds differ and reproduce") {
  CHECK(num::derive_seed(1, 0) != num::derive_seed(1, 1));
  CHECK(num::derive_seed(1, 0) != num::derive_seed(2, 0));
  CHECK(num::derive_seed(7, 3) == num::derive_seed(7, 3));
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<std::atomic<int>> hits(257);
  num::parallel_for(hits.size(), [&](std::size_t i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("moving average is exact on constants and kills one-period ripple") {
  std::vector<double> c(100, 4.0);
  const auto smooth = num::moving_average(c, 11, 3);
  for (const double v : smooth) CHECK(v == doctest::Approx(4.0).epsilon(1e-14));

  // zero-mean ripple with period equal to the window vanishes in the interior
  std::vector<double> ripple(200);
  for (std::size_t i = 0; i < ripple.size(); ++i)
    ripple[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 5.0);
  const auto flat = num::moving_average(ripple, 5, 1);
  for (std::size_t i = 10; i + 10 < flat.size(); ++i) CHECK(std::abs(flat[i]) < 1e-12);

  CHECK_THROWS_AS(num::moving_average(c, 4, 1), std::invalid_argument);
}
