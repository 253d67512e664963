#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace translab::fluct {

// Real scalar field on a periodic lattice of side^dims sites, row-major.
struct LatticeField {
  int dims = 1;
  int side = 0;
  double spacing = 1.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  std::size_t index(const std::array<int, 3>& coord) const;
  double sample_mean() const;
  double sample_variance() const;  // population (1/N), mean subtracted
};

// Radial window profile: 1 on [0,1], 0 beyond support_radius, smooth
// monotone transition between.
struct Window {
  std::function<double(double)> profile;
  double support_radius = 2.0;

  static Window raised_cosine();  // transition on [1,2]
  static Window sharp();          // indicator of [0,1]
};

// Gaussian random field with power spectrum |k|^alpha, exact zero mean
// (nulled zero mode) and unit sample variance. side must be a power of two.
LatticeField synthesize_field(int dims, int side, double alpha, std::uint64_t seed);

// Sum_i profile(d(x_i, center)/R) * q_i with periodic minimum-image distances
// (in units of spacing). Requires R*support_radius <= side*spacing/2.
double windowed_sum(const LatticeField& field, const Window& w, double radius,
                    const std::array<int, 3>& center);

struct VarianceScalingReport {
  std::vector<double> radii;
  std::vector<double> variance;         // ensemble E[Q_R^2]
  std::vector<double> variance_stderr;  // over independent fields
  double beta = 0.0;                    // log-log OLS slope
  double beta_stderr = 0.0;
};

// Ensemble variance of windowed sums vs radius; centers resampled per field
// from `seed`. Requires >= 20 fields and >= 4 radii spanning a factor >= 4.
VarianceScalingReport variance_vs_radius(const std::vector<LatticeField>& ensemble, const Window& w,
                                         const std::vector<double>& radii, int centers_per_field = 8,
                                         std::uint64_t seed = 0);

struct SpectralExponent {
  double alpha_hat = 0.0;
  double stderr_ = 0.0;
  int shells_used = 0;
};

// Radially averaged power spectrum; OLS fit of log power vs log |k| for
// |k| <= k_max_fraction * k_Nyquist, zero mode excluded. Requires side >= 256.
SpectralExponent spectral_exponent(const LatticeField& field, double k_max_fraction);

struct CorrelationIntegralRow {
  double radius = 0.0;
  double integral = 0.0;   // sum over the ball of <q(x) q(y)>
  double relative = 0.0;   // integral / <q(x)^2>
};

// Ensemble estimate of Sum_{y in ball(x, r)} <q(x) q(y)> for growing radii.
// The fields are statistically homogeneous, so the correlation is estimated
// by ensemble plus translation averaging (FFT autocorrelation); x anchors
// the ball. Requires an ensemble of >= 50 fields.
std::vector<CorrelationIntegralRow> correlation_volume_integral(
    const std::vector<LatticeField>& ensemble, const std::array<int, 3>& x,
    const std::vector<double>& radii);

// Coarse field of (side/block)^dims sites; each value is
// N^{-renorm_exponent} * (block sum) with N = block^dims.
LatticeField block_average(const LatticeField& field, int block, double renorm_exponent);

// Spectral power by wavevector (|FFT|^2 / N), plus Parseval helper for tests.
std::vector<double> power_spectrum(const LatticeField& field);

// Plain-text format: header "dims side spacing", then row-major values.
void write_field(const LatticeField& field, std::ostream& os);
LatticeField read_field(std::istream& is);
void save_field(const LatticeField& field, const std::string& path);
LatticeField load_field(const std::string& path);

}  // namespace translab::fluct
