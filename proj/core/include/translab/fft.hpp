#pragma once

#include <complex>
#include <vector>

namespace translab::fft {

using cvec = std::vector<std::complex<double>>;

bool is_power_of_two(std::size_t n);

// In-place complex DFT. Radix-2 for power-of-two lengths, Bluestein otherwise.
// Forward uses the e^{-i k x} sign convention; the inverse applies the 1/n
// factor, so inverse(forward(x)) == x up to roundoff.
void transform(cvec& data, bool inverse);

cvec forward(cvec data);
cvec inverse(cvec data);

// Naive O(n^2) DFT, kept as an independent oracle for tests.
cvec dft_reference(const cvec& data, bool inverse);

}  // namespace translab::fft
