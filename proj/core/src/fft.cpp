#include "translab/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace translab::fft {

namespace {

constexpr double kPi = std::numbers::pi;

void radix2(cvec& a, bool inverse) {
  const std::size_t n = a.size();
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Bluestein's algorithm: expresses an arbitrary-length DFT as a
// power-of-two circular convolution with a chirp sequence.
void bluestein(cvec& a, bool inverse) {
  const std::size_t n = a.size();
  const double sign = inverse ? 1.0 : -1.0;
  cvec chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the phase argument small and exact
    const auto kk = static_cast<unsigned long long>(k) * k % (2 * n);
    const double ang = sign * kPi * static_cast<double>(kk) / static_cast<double>(n);
    chirp[k] = std::complex<double>(std::cos(ang), std::sin(ang));
  }
  const std::size_t m = next_pow2(2 * n - 1);
  cvec fa(m, {0.0, 0.0}), fb(m, {0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) fa[k] = a[k] * chirp[k];
  fb[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) fb[k] = fb[m - k] = std::conj(chirp[k]);
  radix2(fa, false);
  radix2(fb, false);
  for (std::size_t k = 0; k < m; ++k) fa[k] *= fb[k];
  radix2(fa, true);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = fa[k] * scale * chirp[k];
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void transform(cvec& data, bool inverse) {
  const std::size_t n = data.size();
  if (n == 0) throw std::invalid_argument("fft: empty input");
  if (n > 1) {
    if (is_power_of_two(n)) {
      radix2(data, inverse);
    } else {
      bluestein(data, inverse);
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& z : data) z *= scale;
  }
}

cvec forward(cvec data) {
  transform(data, false);
  return data;
}

cvec inverse(cvec data) {
  transform(data, true);
  return data;
}

cvec dft_reference(const cvec& data, bool inverse) {
  const std::size_t n = data.size();
  cvec out(n, {0.0, 0.0});
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = sign * 2.0 * kPi * static_cast<double>(k * j % n) / static_cast<double>(n);
      acc += data[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = inverse ? acc / static_cast<double>(n) : acc;
  }
  return out;
}

}  // namespace translab::fft
