#include "translab/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "translab/fft.hpp"
#include "translab/numeric.hpp"

namespace translab::fluct {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

void check_geometry(const LatticeField& f) {
  if (f.dims < 1 || f.dims > 3) throw std::invalid_argument("field: dims must be 1..3");
  if (f.side < 2) throw std::invalid_argument("field: side must be >= 2");
  if (f.values.size() != ipow(static_cast<std::size_t>(f.side), f.dims))
    throw std::invalid_argument("field: value count does not match side^dims");
}

// FFT along every axis of a row-major side^dims cube.
void fftnd(fft::cvec& data, int dims, int side, bool inverse) {
  const auto n = data.size();
  const auto s = static_cast<std::size_t>(side);
  fft::cvec line(s);
  for (int axis = 0; axis < dims; ++axis) {
    // stride of the axis in row-major layout
    std::size_t stride = 1;
    for (int d = axis + 1; d < dims; ++d) stride *= s;
    const std::size_t block = stride * s;
    for (std::size_t base = 0; base < n; base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (std::size_t i = 0; i < s; ++i) line[i] = data[base + off + i * stride];
        fft::transform(line, inverse);
        for (std::size_t i = 0; i < s; ++i) data[base + off + i * stride] = line[i];
      }
    }
  }
}

void decompose(std::size_t idx, int dims, int side, std::array<int, 3>& coord) {
  coord = {0, 0, 0};
  for (int d = dims - 1; d >= 0; --d) {
    coord[static_cast<std::size_t>(d)] = static_cast<int>(idx % static_cast<std::size_t>(side));
    idx /= static_cast<std::size_t>(side);
  }
}

double mode_radius(const std::array<int, 3>& m, int dims, int side) {
  double r2 = 0.0;
  for (int d = 0; d < dims; ++d) {
    int mm = m[static_cast<std::size_t>(d)];
    if (mm > side / 2) mm -= side;
    r2 += static_cast<double>(mm) * static_cast<double>(mm);
  }
  return std::sqrt(r2);
}

double periodic_distance(const std::array<int, 3>& a, const std::array<int, 3>& b, int dims,
                         int side, double spacing) {
  double r2 = 0.0;
  for (int d = 0; d < dims; ++d) {
    int delta = std::abs(a[static_cast<std::size_t>(d)] - b[static_cast<std::size_t>(d)]);
    delta = std::min(delta, side - delta);
    r2 += static_cast<double>(delta) * static_cast<double>(delta);
  }
  return std::sqrt(r2) * spacing;
}

}  // namespace

std::size_t LatticeField::index(const std::array<int, 3>& coord) const {
  std::size_t idx = 0;
  for (int d = 0; d < dims; ++d) {
    const int c = coord[static_cast<std::size_t>(d)];
    if (c < 0 || c >= side) throw std::invalid_argument("field: coordinate out of range");
    idx = idx * static_cast<std::size_t>(side) + static_cast<std::size_t>(c);
  }
  return idx;
}

double LatticeField::sample_mean() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double LatticeField::sample_variance() const {
  const double m = sample_mean();
  double s = 0.0;
  for (double v : values) s += (v - m) * (v - m);
  return s / static_cast<double>(values.size());
}

Window Window::raised_cosine() {
  Window w;
  w.support_radius = 2.0;
  w.profile = [](double u) {
    if (u <= 1.0) return 1.0;
    if (u >= 2.0) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * (u - 1.0));
    return c * c;
  };
  return w;
}

Window Window::sharp() {
  Window w;
  w.support_radius = 1.0;
  w.profile = [](double u) { return u <= 1.0 ? 1.0 : 0.0; };
  return w;
}

LatticeField synthesize_field(int dims, int side, double alpha, std::uint64_t seed) {
  if (dims < 1 || dims > 3) throw std::invalid_argument("synthesize_field: dims must be 1..3");
  if (side < 2 || !fft::is_power_of_two(static_cast<std::size_t>(side)))
    throw std::invalid_argument("synthesize_field: side must be a power of two >= 2");
  if (alpha < 0.0 || alpha > 4.0) throw std::invalid_argument("synthesize_field: alpha must be in [0,4]");
  const std::size_t n = ipow(static_cast<std::size_t>(side), dims);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  fft::cvec spec(n, {0.0, 0.0});
  std::array<int, 3> m{};
  std::array<int, 3> mc{};
  for (std::size_t idx = 0; idx < n; ++idx) {
    decompose(idx, dims, side, m);
    std::size_t partner = 0;
    for (int d = 0; d < dims; ++d) {
      mc[static_cast<std::size_t>(d)] = (side - m[static_cast<std::size_t>(d)]) % side;
      partner = partner * static_cast<std::size_t>(side) +
                static_cast<std::size_t>(mc[static_cast<std::size_t>(d)]);
    }
    if (idx > partner) continue;
    const double rho = mode_radius(m, dims, side);
    const double k = kTau * rho / static_cast<double>(side);  // spacing-free; scale is normalized away
    const double sigma = rho == 0.0 ? 0.0 : std::pow(k, 0.5 * alpha);
    if (idx == partner) {
      spec[idx] = {sigma * gauss(rng), 0.0};
    } else {
      const double re = gauss(rng);
      const double im = gauss(rng);
      spec[idx] = {sigma * re * std::numbers::sqrt2 / 2.0, sigma * im * std::numbers::sqrt2 / 2.0};
      spec[partner] = std::conj(spec[idx]);
    }
  }
  fftnd(spec, dims, side, true);

  LatticeField field;
  field.dims = dims;
  field.side = side;
  field.spacing = 1.0;
  field.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) field.values[i] = spec[i].real();
  const double var = field.sample_variance();
  if (!(var > 0.0)) throw std::runtime_error("synthesize_field: degenerate field");
  const double scale = 1.0 / std::sqrt(var);
  for (double& v : field.values) v *= scale;
  return field;
}

double windowed_sum(const LatticeField& field, const Window& w, double radius,
                    const std::array<int, 3>& center) {
  check_geometry(field);
  if (!(radius > 0.0)) throw std::invalid_argument("windowed_sum: radius must be positive");
  const double extent = radius * w.support_radius;
  if (extent > 0.5 * field.side * field.spacing)
    throw std::invalid_argument("windowed_sum: window exceeds half the box");
  (void)field.index(center);

  // iterate only the bounding box of the support, clipped to the set of
  // distinct periodic offsets so no site is visited twice
  const int reach = static_cast<int>(std::floor(extent / field.spacing)) + 1;
  const int lo = std::max(-reach, -((field.side - 1) / 2));
  const int hi = std::min(reach, field.side / 2);
  double sum = 0.0;
  std::array<int, 3> c{};
  auto site_term = [&](const std::array<int, 3>& offset) {
    double r2 = 0.0;
    for (int d = 0; d < field.dims; ++d) {
      const double dd = offset[static_cast<std::size_t>(d)];
      r2 += dd * dd;
    }
    const double u = std::sqrt(r2) * field.spacing / radius;
    if (u >= w.support_radius) return;
    const double p = w.profile(u);
    if (p == 0.0) return;
    for (int d = 0; d < field.dims; ++d) {
      int x = center[static_cast<std::size_t>(d)] + offset[static_cast<std::size_t>(d)];
      x %= field.side;
      if (x < 0) x += field.side;
      c[static_cast<std::size_t>(d)] = x;
    }
    sum += p * field.values[field.index(c)];
  };
  std::array<int, 3> off{0, 0, 0};
  if (field.dims == 1) {
    for (int i = lo; i <= hi; ++i) {
      off[0] = i;
      site_term(off);
    }
  } else if (field.dims == 2) {
    for (int i = lo; i <= hi; ++i)
      for (int j = lo; j <= hi; ++j) {
        off[0] = i;
        off[1] = j;
        site_term(off);
      }
  } else {
    for (int i = lo; i <= hi; ++i)
      for (int j = lo; j <= hi; ++j)
        for (int k = lo; k <= hi; ++k) {
          off[0] = i;
          off[1] = j;
          off[2] = k;
          site_term(off);
        }
  }
  return sum;
}

VarianceScalingReport variance_vs_radius(const std::vector<LatticeField>& ensemble, const Window& w,
                                         const std::vector<double>& radii, int centers_per_field,
                                         std::uint64_t seed) {
  if (ensemble.size() < 20) throw std::invalid_argument("variance_vs_radius: need >= 20 fields");
  if (radii.size() < 4) throw std::invalid_argument("variance_vs_radius: need >= 4 radii");
  const auto [rmin, rmax] = std::minmax_element(radii.begin(), radii.end());
  if (*rmax < 4.0 * *rmin)
    throw std::invalid_argument("variance_vs_radius: radii must span a factor >= 4");
  if (centers_per_field < 1) throw std::invalid_argument("variance_vs_radius: centers_per_field >= 1");

  const std::size_t nf = ensemble.size();
  const std::size_t nr = radii.size();
  // per_field_mean[r][f]: mean of Q^2 over that field's centers
  std::vector<std::vector<double>> per_field(nr, std::vector<double>(nf, 0.0));
  num::parallel_for(nf, [&](std::size_t fi) {
    const auto& field = ensemble[fi];
    check_geometry(field);
    std::mt19937_64 rng(num::derive_seed(seed, fi));
    std::uniform_int_distribution<int> pick(0, field.side - 1);
    for (int ci = 0; ci < centers_per_field; ++ci) {
      std::array<int, 3> center{0, 0, 0};
      for (int d = 0; d < field.dims; ++d) center[static_cast<std::size_t>(d)] = pick(rng);
      for (std::size_t ri = 0; ri < nr; ++ri) {
        const double q = windowed_sum(field, w, radii[ri], center);
        per_field[ri][fi] += q * q / static_cast<double>(centers_per_field);
      }
    }
  });

  VarianceScalingReport rep;
  rep.radii = radii;
  rep.variance.resize(nr);
  rep.variance_stderr.resize(nr);
  for (std::size_t ri = 0; ri < nr; ++ri) {
    rep.variance[ri] = num::mean(per_field[ri]);
    rep.variance_stderr[ri] =
        std::sqrt(num::variance(per_field[ri]) / static_cast<double>(nf));
  }
  std::vector<double> lx(nr), ly(nr);
  for (std::size_t ri = 0; ri < nr; ++ri) {
    lx[ri] = std::log(radii[ri]);
    ly[ri] = std::log(rep.variance[ri]);
  }
  const auto fit = num::fit_line(lx, ly);
  rep.beta = fit.slope;
  rep.beta_stderr = fit.slope_stderr;
  return rep;
}

SpectralExponent spectral_exponent(const LatticeField& field, double k_max_fraction) {
  check_geometry(field);
  if (field.side < 256) throw std::invalid_argument("spectral_exponent: side must be >= 256");
  if (!(k_max_fraction > 0.0) || k_max_fraction > 0.25)
    throw std::invalid_argument("spectral_exponent: k_max_fraction must be in (0, 0.25]");
  const auto power = power_spectrum(field);
  const double rho_max = k_max_fraction * 0.5 * field.side;  // |k| <= frac * k_Nyquist

  const auto n_shells = static_cast<std::size_t>(std::floor(rho_max)) + 1;
  std::vector<double> shell_power(n_shells, 0.0), shell_k(n_shells, 0.0);
  std::vector<std::size_t> shell_count(n_shells, 0);
  std::array<int, 3> m{};
  for (std::size_t idx = 0; idx < power.size(); ++idx) {
    decompose(idx, field.dims, field.side, m);
    const double rho = mode_radius(m, field.dims, field.side);
    if (rho < 0.5 || rho > rho_max) continue;
    const auto shell = static_cast<std::size_t>(std::llround(rho));
    if (shell >= n_shells) continue;
    shell_power[shell] += power[idx];
    shell_k[shell] += kTau * rho / (field.side * field.spacing);
    shell_count[shell] += 1;
  }
  std::vector<double> lx, ly;
  for (std::size_t s = 1; s < n_shells; ++s) {
    if (shell_count[s] == 0) continue;
    const double p = shell_power[s] / static_cast<double>(shell_count[s]);
    if (!(p > 0.0)) throw std::invalid_argument("spectral_exponent: degenerate spectrum");
    lx.push_back(std::log(shell_k[s] / static_cast<double>(shell_count[s])));
    ly.push_back(std::log(p));
  }
  if (lx.size() < 4) throw std::invalid_argument("spectral_exponent: too few modes in the fit band");
  const auto fit = num::fit_line(lx, ly);
  return {fit.slope, fit.slope_stderr, static_cast<int>(lx.size())};
}

std::vector<CorrelationIntegralRow> correlation_volume_integral(
    const std::vector<LatticeField>& ensemble, const std::array<int, 3>& x,
    const std::vector<double>& radii) {
  if (ensemble.size() < 50)
    throw std::invalid_argument("correlation_volume_integral: need >= 50 fields");
  if (radii.empty()) throw std::invalid_argument("correlation_volume_integral: no radii");
  if (!std::is_sorted(radii.begin(), radii.end()))
    throw std::invalid_argument("correlation_volume_integral: radii must be ascending");
  const auto& proto = ensemble.front();
  check_geometry(proto);
  (void)proto.index(x);  // the fields are homogeneous; x only anchors the ball

  // <q(x) q(x+delta)> estimated by ensemble plus translation averaging
  // (periodic autocorrelation through the FFT)
  std::vector<double> corr(proto.size(), 0.0);
  fft::cvec work(proto.size());
  for (const auto& field : ensemble) {
    if (field.dims != proto.dims || field.side != proto.side)
      throw std::invalid_argument("correlation_volume_integral: mixed geometries");
    for (std::size_t i = 0; i < field.size(); ++i) work[i] = {field.values[i], 0.0};
    fftnd(work, field.dims, field.side, false);
    for (auto& z : work) z = {std::norm(z), 0.0};
    fftnd(work, field.dims, field.side, true);
    for (std::size_t i = 0; i < field.size(); ++i)
      corr[i] += work[i].real() / static_cast<double>(field.size());
  }
  for (double& c : corr) c /= static_cast<double>(ensemble.size());

  // offsets sorted by distance from the origin (ties by index, deterministic)
  std::vector<std::pair<double, std::size_t>> order(proto.size());
  std::array<int, 3> c{};
  const std::array<int, 3> origin{0, 0, 0};
  for (std::size_t idx = 0; idx < proto.size(); ++idx) {
    decompose(idx, proto.dims, proto.side, c);
    order[idx] = {periodic_distance(c, origin, proto.dims, proto.side, proto.spacing), idx};
  }
  std::sort(order.begin(), order.end());

  const double var0 = corr[0];
  std::vector<CorrelationIntegralRow> rows(radii.size());
  double acc = 0.0;
  std::size_t site = 0;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    while (site < order.size() && order[site].first <= radii[ri]) {
      acc += corr[order[site].second];
      ++site;
    }
    rows[ri].radius = radii[ri];
    rows[ri].integral = acc;
    rows[ri].relative = var0 > 0.0 ? acc / var0 : 0.0;
  }
  return rows;
}

LatticeField block_average(const LatticeField& field, int block, double renorm_exponent) {
  check_geometry(field);
  if (block < 2) throw std::invalid_argument("block_average: block must be >= 2");
  if (field.side % block != 0) throw std::invalid_argument("block_average: block must divide side");
  const int coarse_side = field.side / block;
  LatticeField out;
  out.dims = field.dims;
  out.side = coarse_side;
  out.spacing = field.spacing * block;
  out.values.assign(ipow(static_cast<std::size_t>(coarse_side), field.dims), 0.0);
  const double norm = std::pow(static_cast<double>(ipow(static_cast<std::size_t>(block), field.dims)),
                               -renorm_exponent);

  std::array<int, 3> fine{};
  for (std::size_t idx = 0; idx < field.size(); ++idx) {
    decompose(idx, field.dims, field.side, fine);
    std::array<int, 3> coarse{0, 0, 0};
    for (int d = 0; d < field.dims; ++d)
      coarse[static_cast<std::size_t>(d)] = fine[static_cast<std::size_t>(d)] / block;
    out.values[out.index(coarse)] += field.values[idx];
  }
  for (double& v : out.values) v *= norm;
  return out;
}

std::vector<double> power_spectrum(const LatticeField& field) {
  check_geometry(field);
  fft::cvec data(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) data[i] = {field.values[i], 0.0};
  fftnd(data, field.dims, field.side, false);
  std::vector<double> power(field.size());
  for (std::size_t i = 0; i < field.size(); ++i)
    power[i] = std::norm(data[i]) / static_cast<double>(field.size());
  return power;
}

void write_field(const LatticeField& field, std::ostream& os) {
  check_geometry(field);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", field.spacing);
  os << field.dims << " " << field.side << " " << buf << "\n";
  for (const double v : field.values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf << "\n";
  }
}

LatticeField read_field(std::istream& is) {
  LatticeField f;
  if (!(is >> f.dims >> f.side >> f.spacing)) throw std::runtime_error("field file: bad header");
  const std::size_t n = ipow(static_cast<std::size_t>(f.side), f.dims);
  f.values.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!(is >> f.values[i])) throw std::runtime_error("field file: truncated values");
  check_geometry(f);
  return f;
}

void save_field(const LatticeField& field, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  write_field(field, os);
}

LatticeField load_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for read: " + path);
  return read_field(is);
}

}  // namespace translab::fluct
