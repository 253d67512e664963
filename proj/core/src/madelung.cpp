#include "translab/madelung.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>

#include "translab/fft.hpp"
#include "translab/numeric.hpp"

namespace translab::qm {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;
using cplx = std::complex<double>;

void check_wf(const WaveFunction& wf) {
  if (wf.dims != 1 && wf.dims != 2) throw std::invalid_argument("wavefunction: dims must be 1 or 2");
  if (wf.n < 8) throw std::invalid_argument("wavefunction: grid too small");
  const std::size_t expect = wf.dims == 1 ? static_cast<std::size_t>(wf.n)
                                          : static_cast<std::size_t>(wf.n) * static_cast<std::size_t>(wf.n);
  if (wf.psi.size() != expect) throw std::invalid_argument("wavefunction: grid size mismatch");
  if (!(wf.dx > 0.0)) throw std::invalid_argument("wavefunction: dx must be positive");
}

double cell_measure(const WaveFunction& wf) {
  return wf.dims == 1 ? wf.dx : wf.dx * wf.dx;
}

// Solve a cyclic tridiagonal system with constant off-diagonal `off` and
// periodic corner entries, via Thomas + Sherman-Morrison. diag/rhs may alias.
void cyclic_tridiagonal(const std::vector<cplx>& diag, cplx off, std::vector<cplx>& rhs,
                        std::vector<cplx>& scratch_diag, std::vector<cplx>& scratch_u) {
  const std::size_t n = diag.size();
  const cplx gamma = -diag[0];
  scratch_diag = diag;
  scratch_diag[0] -= gamma;
  scratch_diag[n - 1] -= off * off / gamma;
  scratch_u.assign(n, cplx(0.0, 0.0));
  scratch_u[0] = gamma;
  scratch_u[n - 1] = off;

  auto thomas = [&](std::vector<cplx>& b) {
    // forward sweep against scratch_diag with constant off
    static thread_local std::vector<cplx> c_prime;
    c_prime.assign(n, cplx(0.0, 0.0));
    cplx denom = scratch_diag[0];
    c_prime[0] = off / denom;
    b[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
      denom = scratch_diag[i] - off * c_prime[i - 1];
      c_prime[i] = off / denom;
      b[i] = (b[i] - off * b[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) b[i] -= c_prime[i] * b[i + 1];
  };

  std::vector<cplx> z = scratch_u;
  thomas(rhs);
  thomas(z);
  // v = (1, 0, ..., 0, off/gamma)
  const cplx vy = rhs[0] + (off / gamma) * rhs[n - 1];
  const cplx vz = z[0] + (off / gamma) * z[n - 1];
  const cplx factor = vy / (1.0 + vz);
  for (std::size_t i = 0; i < n; ++i) rhs[i] -= factor * z[i];
}

// One Cayley (Crank-Nicolson) substep along one axis of a 1D or 2D grid:
//   (1 + i tau/2 H_axis) psi' = (1 - i tau/2 H_axis) psi
// H_axis = -(1/2m) d^2/dx^2 + Vdiag. axis stride selects x1 or x2 lines.
void cayley_axis(std::vector<cplx>& psi, const std::vector<double>& vdiag, int n, double dx,
                 double mass, double tau, std::size_t stride, std::size_t lines,
                 std::size_t line_stride) {
  const double kin = 1.0 / (2.0 * mass * dx * dx);
  const cplx ih(0.0, 0.5 * tau);
  const cplx off = ih * cplx(-kin, 0.0);
  const auto nn = static_cast<std::size_t>(n);

  std::vector<cplx> diag(nn), rhs(nn), sd, su;
  for (std::size_t line = 0; line < lines; ++line) {
    const std::size_t base = line * line_stride;
    for (std::size_t i = 0; i < nn; ++i) {
      const std::size_t idx = base + i * stride;
      const double h_d = 2.0 * kin + vdiag[idx];
      diag[i] = cplx(1.0, 0.0) + ih * h_d;
      const std::size_t prev = base + ((i + nn - 1) % nn) * stride;
      const std::size_t next = base + ((i + 1) % nn) * stride;
      // rhs = (1 - i tau/2 H) psi
      rhs[i] = psi[idx] - ih * (h_d * psi[idx] - kin * (psi[prev] + psi[next]));
    }
    cyclic_tridiagonal(diag, off, rhs, sd, su);
    for (std::size_t i = 0; i < nn; ++i) psi[base + i * stride] = rhs[i];
  }
}

std::vector<double> amplitude_of(const WaveFunction& wf) {
  std::vector<double> r(wf.size());
  for (std::size_t i = 0; i < wf.size(); ++i) r[i] = std::abs(wf.psi[i]);
  return r;
}

std::vector<std::uint8_t> mask_of(const std::vector<double>& amp, double floor_fraction) {
  const double peak = *std::max_element(amp.begin(), amp.end());
  std::vector<std::uint8_t> m(amp.size(), 0);
  for (std::size_t i = 0; i < amp.size(); ++i) m[i] = amp[i] < floor_fraction * peak ? 1 : 0;
  return m;
}

// neighbor index along an axis with periodic wrap, for dims in {1,2}
std::size_t shift_index(std::size_t idx, int dims, int n, int axis, int step) {
  const auto nn = static_cast<std::size_t>(n);
  if (dims == 1) {
    return (idx + nn + static_cast<std::size_t>((step + n) % n)) % nn;
  }
  const std::size_t i1 = idx / nn;
  const std::size_t i2 = idx % nn;
  const auto s = static_cast<std::size_t>((step + n) % n);
  if (axis == 0) return ((i1 + s) % nn) * nn + i2;
  return i1 * nn + (i2 + s) % nn;
}

}  // namespace

double norm(const WaveFunction& wf) {
  double s = 0.0;
  for (const auto& z : wf.psi) s += std::norm(z);
  return std::sqrt(s * cell_measure(wf));
}

void normalize(WaveFunction& wf) {
  const double nrm = norm(wf);
  if (!(nrm > 0.0)) throw std::invalid_argument("normalize: zero wavefunction");
  for (auto& z : wf.psi) z /= nrm;
}

WaveFunction gaussian_packet(int n, double dx, double x0, double sigma, double k0, double mass) {
  WaveFunction wf;
  wf.dims = 1;
  wf.n = n;
  wf.dx = dx;
  wf.m1 = wf.m2 = mass;
  wf.psi.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = wf.coord(i);
    const double g = std::exp(-(x - x0) * (x - x0) / (4.0 * sigma * sigma));
    wf.psi[static_cast<std::size_t>(i)] = std::polar(g, k0 * x);
  }
  check_wf(wf);
  normalize(wf);
  return wf;
}

WaveFunction plane_wave(int n, double dx, int k_index, double mass) {
  WaveFunction wf;
  wf.dims = 1;
  wf.n = n;
  wf.dx = dx;
  wf.m1 = wf.m2 = mass;
  wf.psi.resize(static_cast<std::size_t>(n));
  const double k = kTau * k_index / (n * dx);
  for (int i = 0; i < n; ++i) wf.psi[static_cast<std::size_t>(i)] = std::polar(1.0, k * wf.coord(i));
  check_wf(wf);
  return wf;
}

WaveFunction product_state(const WaveFunction& a, const WaveFunction& b) {
  check_wf(a);
  check_wf(b);
  if (a.dims != 1 || b.dims != 1 || a.n != b.n || a.dx != b.dx)
    throw std::invalid_argument("product_state: needs two matching 1D factors");
  WaveFunction wf;
  wf.dims = 2;
  wf.n = a.n;
  wf.dx = a.dx;
  wf.m1 = a.m1;
  wf.m2 = b.m1;
  wf.psi.resize(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) wf.psi[i * b.size() + j] = a.psi[i] * b.psi[j];
  return wf;
}

double mean_position(const WaveFunction& wf) {
  check_wf(wf);
  if (wf.dims != 1) throw std::invalid_argument("mean_position: 1D only");
  double num = 0.0, den = 0.0;
  for (int i = 0; i < wf.n; ++i) {
    const double p = std::norm(wf.psi[static_cast<std::size_t>(i)]);
    num += wf.coord(i) * p;
    den += p;
  }
  return num / den;
}

double position_variance(const WaveFunction& wf) {
  const double mu = mean_position(wf);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < wf.n; ++i) {
    const double p = std::norm(wf.psi[static_cast<std::size_t>(i)]);
    num += (wf.coord(i) - mu) * (wf.coord(i) - mu) * p;
    den += p;
  }
  return num / den;
}

std::vector<double> harmonic_potential(int n, double dx, double m, double omega) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = (i - n / 2) * dx;
    v[static_cast<std::size_t>(i)] = 0.5 * m * omega * omega * x * x;
  }
  return v;
}

WaveFunction ground_state(const std::vector<double>& potential, int n, double dx, double mass) {
  if (potential.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("ground_state: potential size mismatch");
  WaveFunction wf;
  wf.dims = 1;
  wf.n = n;
  wf.dx = dx;
  wf.m1 = wf.m2 = mass;
  wf.psi.assign(static_cast<std::size_t>(n), cplx(1.0, 0.0));

  const double kin = 1.0 / (2.0 * mass * dx * dx);
  const double shift = *std::min_element(potential.begin(), potential.end()) - 1.0;
  std::vector<cplx> diag(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    diag[static_cast<std::size_t>(i)] = cplx(2.0 * kin + potential[static_cast<std::size_t>(i)] - shift, 0.0);
  const cplx off(-kin, 0.0);

  std::vector<cplx> rhs, sd, su;
  double rayleigh_prev = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    rhs = wf.psi;
    cyclic_tridiagonal(diag, off, rhs, sd, su);
    double nrm = 0.0;
    for (const auto& z : rhs) nrm += std::norm(z);
    nrm = std::sqrt(nrm * dx);
    for (auto& z : rhs) z /= nrm;
    wf.psi = rhs;
    // Rayleigh quotient of H (shift restored)
    double energy = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      const auto prev = static_cast<std::size_t>((i + n - 1) % n);
      const auto next = static_cast<std::size_t>((i + 1) % n);
      const cplx hpsi = (2.0 * kin + potential[idx]) * wf.psi[idx] -
                        kin * (wf.psi[prev] + wf.psi[next]);
      energy += (std::conj(wf.psi[idx]) * hpsi).real();
    }
    energy *= dx;
    if (iter > 3 && std::abs(energy - rayleigh_prev) < 1e-14 * std::max(1.0, std::abs(energy)))
      break;
    rayleigh_prev = energy;
  }
  // fix the global phase: real positive at the density maximum
  std::size_t peak = 0;
  for (std::size_t i = 0; i < wf.size(); ++i)
    if (std::abs(wf.psi[i]) > std::abs(wf.psi[peak])) peak = i;
  const cplx rot = std::abs(wf.psi[peak]) / wf.psi[peak];
  for (auto& z : wf.psi) z *= rot;
  return wf;
}

namespace {

Evolution run_evolution(const WaveFunction& psi0, const std::vector<double>& potential, double dt,
                        std::size_t steps, std::size_t stride, bool relax_guard, bool two_particle) {
  check_wf(psi0);
  if (potential.size() != psi0.size())
    throw std::invalid_argument("evolve: potential grid must match the wavefunction");
  if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
  if (stride == 0) stride = 1;
  const double m_min = std::min(psi0.m1, psi0.m2);
  if (dt > psi0.dx * psi0.dx * m_min && !relax_guard)
    throw std::invalid_argument("evolve: dt > dx^2 * m accuracy guard; pass relax_guard to override");
  if (two_particle && psi0.dims != 2)
    throw std::invalid_argument("evolve_two_particle: needs a 2D configuration grid");
  if (!two_particle && psi0.dims != 1)
    throw std::invalid_argument("evolve: needs a 1D grid (see evolve_two_particle)");
  if (two_particle && psi0.n > 512)
    throw std::invalid_argument("evolve_two_particle: grid larger than 512 per axis");

  Evolution ev;
  WaveFunction wf = psi0;
  ev.t.push_back(0.0);
  ev.snaps.push_back(wf);
  const auto nn = static_cast<std::size_t>(psi0.n);

  std::vector<double> half_v;
  if (two_particle) {
    half_v.resize(potential.size());
    for (std::size_t i = 0; i < potential.size(); ++i) half_v[i] = 0.5 * potential[i];
  }

  for (std::size_t s = 1; s <= steps; ++s) {
    if (!two_particle) {
      cayley_axis(wf.psi, potential, wf.n, wf.dx, wf.m1, dt, 1, 1, 0);
    } else {
      // Strang split: half step along x1, full step along x2, half along x1.
      cayley_axis(wf.psi, half_v, wf.n, wf.dx, wf.m1, 0.5 * dt, nn, nn, 1);
      cayley_axis(wf.psi, half_v, wf.n, wf.dx, wf.m2, dt, 1, nn, nn);
      cayley_axis(wf.psi, half_v, wf.n, wf.dx, wf.m1, 0.5 * dt, nn, nn, 1);
    }
    if (s % stride == 0 || s == steps) {
      ev.t.push_back(static_cast<double>(s) * dt);
      ev.snaps.push_back(wf);
    }
  }
  return ev;
}

}  // namespace

Evolution evolve(const WaveFunction& psi0, const std::vector<double>& potential, double dt,
                 std::size_t steps, std::size_t stride, bool relax_guard) {
  return run_evolution(psi0, potential, dt, steps, stride, relax_guard, false);
}

Evolution evolve_two_particle(const WaveFunction& psi0, const std::vector<double>& potential,
                              double dt, std::size_t steps, std::size_t stride, bool relax_guard) {
  return run_evolution(psi0, potential, dt, steps, stride, relax_guard, true);
}

MadelungPair split(const WaveFunction& wf, double floor_fraction) {
  check_wf(wf);
  MadelungPair mp;
  mp.amplitude = amplitude_of(wf);
  if (!(*std::max_element(mp.amplitude.begin(), mp.amplitude.end()) > 0.0))
    throw std::invalid_argument("split: every site is below the amplitude floor");
  mp.masked = mask_of(mp.amplitude, floor_fraction);
  mp.phase.assign(wf.size(), 0.0);

  std::vector<double> raw(wf.size());
  for (std::size_t i = 0; i < wf.size(); ++i) raw[i] = std::arg(wf.psi[i]);

  // BFS spanning tree from the global amplitude maximum; each unmasked
  // component is anchored at its own maximum (ties broken by index).
  std::vector<std::uint8_t> visited(wf.size(), 0);
  std::vector<std::size_t> order(wf.size());
  for (std::size_t i = 0; i < wf.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mp.amplitude[a] != mp.amplitude[b] ? mp.amplitude[a] > mp.amplitude[b] : a < b;
  });

  const int n_axes = wf.dims;
  auto neighbors_of = [&](std::size_t idx, auto&& fn) {
    for (int axis = 0; axis < n_axes; ++axis) {
      fn(shift_index(idx, wf.dims, wf.n, axis, 1));
      fn(shift_index(idx, wf.dims, wf.n, axis, -1));
    }
  };

  std::deque<std::size_t> queue;
  for (const std::size_t seed : order) {
    if (visited[seed] || mp.masked[seed]) continue;
    visited[seed] = 1;
    mp.phase[seed] = raw[seed];
    queue.push_back(seed);
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      neighbors_of(u, [&](std::size_t v) {
        if (visited[v] || mp.masked[v]) return;
        visited[v] = 1;
        mp.phase[v] = mp.phase[u] + num::wrap_pi(raw[v] - raw[u]);
        queue.push_back(v);
      });
    }
  }

  // loop-closure check over all unmasked edges
  double worst = 0.0;
  for (std::size_t u = 0; u < wf.size(); ++u) {
    if (mp.masked[u]) continue;
    for (int axis = 0; axis < n_axes; ++axis) {
      const std::size_t v = shift_index(u, wf.dims, wf.n, axis, 1);
      if (mp.masked[v]) continue;
      const double mismatch = std::abs((mp.phase[v] - mp.phase[u]) - num::wrap_pi(raw[v] - raw[u]));
      worst = std::max(worst, mismatch);
    }
  }
  mp.unwrap_residual = worst;
  return mp;
}

MaskedGrid quantum_potential(const std::vector<double>& amplitude,
                             const std::vector<std::uint8_t>& masked, int dims, int n, double mass,
                             double dx) {
  if (amplitude.size() != masked.size()) throw std::invalid_argument("quantum_potential: size mismatch");
  MaskedGrid out;
  out.values.assign(amplitude.size(), 0.0);
  out.masked.assign(amplitude.size(), 0);
  for (std::size_t i = 0; i < amplitude.size(); ++i) {
    bool bad = masked[i] != 0;
    double lap = 0.0;
    for (int axis = 0; axis < dims && !bad; ++axis) {
      const std::size_t prev = shift_index(i, dims, n, axis, -1);
      const std::size_t next = shift_index(i, dims, n, axis, 1);
      if (masked[prev] || masked[next]) {
        bad = true;
        break;
      }
      lap += (amplitude[next] - 2.0 * amplitude[i] + amplitude[prev]) / (dx * dx);
    }
    if (bad) {
      out.masked[i] = 1;
    } else {
      out.values[i] = -lap / (2.0 * mass * amplitude[i]);
    }
  }
  return out;
}

namespace {

// wrapped centered phase derivative along an axis (no global unwrap needed)
double phase_gradient(const std::vector<double>& raw, std::size_t idx, int dims, int n, int axis,
                      double dx) {
  const std::size_t prev = shift_index(idx, dims, n, axis, -1);
  const std::size_t next = shift_index(idx, dims, n, axis, 1);
  return 0.5 * (num::wrap_pi(raw[next] - raw[idx]) + num::wrap_pi(raw[idx] - raw[prev])) / dx;
}

struct SnapshotView {
  std::vector<double> rho;
  std::vector<double> raw;  // arg psi
  std::vector<double> amp;
  std::vector<std::uint8_t> masked;
};

SnapshotView view_of(const WaveFunction& wf, double floor_fraction) {
  SnapshotView v;
  v.rho.resize(wf.size());
  v.raw.resize(wf.size());
  v.amp.resize(wf.size());
  for (std::size_t i = 0; i < wf.size(); ++i) {
    v.rho[i] = std::norm(wf.psi[i]);
    v.raw[i] = std::arg(wf.psi[i]);
    v.amp[i] = std::abs(wf.psi[i]);
  }
  v.masked = mask_of(v.amp, floor_fraction);
  return v;
}

void check_traj(const Evolution& traj) {
  if (traj.snaps.size() < 3)
    throw std::invalid_argument("residual: need at least 3 snapshots for centered time differences");
  const double step = traj.t[1] - traj.t[0];
  for (std::size_t s = 1; s + 1 < traj.t.size(); ++s)
    if (std::abs((traj.t[s + 1] - traj.t[s]) - step) > 1e-9 * std::max(1.0, std::abs(step)))
      throw std::invalid_argument("residual: snapshots must be uniformly spaced");
}

// true when the full residual stencil around idx is unmasked in all three views
bool stencil_clear(const SnapshotView& a, const SnapshotView& b, const SnapshotView& c,
                   std::size_t idx, int dims, int n) {
  auto site_ok = [&](std::size_t j) { return !a.masked[j] && !b.masked[j] && !c.masked[j]; };
  if (!site_ok(idx)) return false;
  for (int axis = 0; axis < dims; ++axis)
    for (int step : {-2, -1, 1, 2})
      if (!site_ok(shift_index(idx, dims, n, axis, step))) return false;
  return true;
}

}  // namespace

ResidualNorms continuity_residual(const Evolution& traj, double floor_fraction) {
  check_traj(traj);
  const auto& proto = traj.snaps.front();
  const int dims = proto.dims;
  const int n = proto.n;
  const double dx = proto.dx;
  const double dt_snap = traj.t[1] - traj.t[0];
  const double masses[2] = {proto.m1, proto.m2};

  ResidualNorms norms;
  double sum_sq = 0.0;
  std::vector<SnapshotView> views;
  views.push_back(view_of(traj.snaps[0], floor_fraction));
  views.push_back(view_of(traj.snaps[1], floor_fraction));
  for (std::size_t s = 1; s + 1 < traj.snaps.size(); ++s) {
    views.push_back(view_of(traj.snaps[s + 1], floor_fraction));
    const auto& prev = views[0];
    const auto& cur = views[1];
    const auto& next = views[2];

    // node fluxes rho * v per axis
    std::vector<std::vector<double>> flux(static_cast<std::size_t>(dims),
                                          std::vector<double>(cur.rho.size(), 0.0));
    for (int axis = 0; axis < dims; ++axis)
      for (std::size_t i = 0; i < cur.rho.size(); ++i)
        flux[static_cast<std::size_t>(axis)][i] =
            cur.rho[i] * phase_gradient(cur.raw, i, dims, n, axis, dx) /
            masses[static_cast<std::size_t>(axis)];

    for (std::size_t i = 0; i < cur.rho.size(); ++i) {
      if (!stencil_clear(prev, cur, next, i, dims, n)) continue;
      const double drho_dt = (next.rho[i] - prev.rho[i]) / (2.0 * dt_snap);
      double div = 0.0;
      for (int axis = 0; axis < dims; ++axis) {
        const std::size_t ip = shift_index(i, dims, n, axis, 1);
        const std::size_t im = shift_index(i, dims, n, axis, -1);
        div += (flux[static_cast<std::size_t>(axis)][ip] -
                flux[static_cast<std::size_t>(axis)][im]) /
               (2.0 * dx);
      }
      const double res = drho_dt + div;
      sum_sq += res * res;
      norms.max = std::max(norms.max, std::abs(res));
      ++norms.points;
    }
    views.erase(views.begin());
  }
  if (norms.points == 0) throw std::invalid_argument("continuity_residual: no unmasked points");
  norms.rms = std::sqrt(sum_sq / static_cast<double>(norms.points));
  return norms;
}

namespace {

ResidualNorms hj_residual_impl(const Evolution& traj, const std::vector<double>& potential,
                               SignConvention convention, double floor_fraction) {
  check_traj(traj);
  const auto& proto = traj.snaps.front();
  if (potential.size() != proto.size())
    throw std::invalid_argument("hj_residual: potential grid mismatch");
  const int dims = proto.dims;
  const int n = proto.n;
  const double dx = proto.dx;
  const double dt_snap = traj.t[1] - traj.t[0];
  const double masses[2] = {proto.m1, proto.m2};
  const double sign = convention == SignConvention::standard ? 1.0 : -1.0;

  ResidualNorms norms;
  double sum_sq = 0.0;
  std::vector<SnapshotView> views;
  views.push_back(view_of(traj.snaps[0], floor_fraction));
  views.push_back(view_of(traj.snaps[1], floor_fraction));
  for (std::size_t s = 1; s + 1 < traj.snaps.size(); ++s) {
    views.push_back(view_of(traj.snaps[s + 1], floor_fraction));
    const auto& prev = views[0];
    const auto& cur = views[1];
    const auto& next = views[2];
    for (std::size_t i = 0; i < cur.rho.size(); ++i) {
      if (!stencil_clear(prev, cur, next, i, dims, n)) continue;
      const double ds_dt = 0.5 * (num::wrap_pi(next.raw[i] - cur.raw[i]) +
                                  num::wrap_pi(cur.raw[i] - prev.raw[i])) /
                           dt_snap;
      double kinetic = 0.0;
      double qterm = 0.0;
      for (int axis = 0; axis < dims; ++axis) {
        const double g = phase_gradient(cur.raw, i, dims, n, axis, dx);
        kinetic += g * g / (2.0 * masses[static_cast<std::size_t>(axis)]);
        const std::size_t ip = shift_index(i, dims, n, axis, 1);
        const std::size_t im = shift_index(i, dims, n, axis, -1);
        const double lap = (cur.amp[ip] - 2.0 * cur.amp[i] + cur.amp[im]) / (dx * dx);
        qterm += lap / (2.0 * masses[static_cast<std::size_t>(axis)] * cur.amp[i]);
      }
      // standard: dS/dt + (grad S)^2/2m + V - qterm = 0
      // flipped:  dS/dt + (grad S)^2/2m - V + qterm = 0
      const double res = ds_dt + kinetic + sign * (potential[i] - qterm);
      sum_sq += res * res;
      norms.max = std::max(norms.max, std::abs(res));
      ++norms.points;
    }
    views.erase(views.begin());
  }
  if (norms.points == 0) throw std::invalid_argument("hj_residual: no unmasked points");
  norms.rms = std::sqrt(sum_sq / static_cast<double>(norms.points));
  return norms;
}

}  // namespace

ResidualNorms hj_residual(const Evolution& traj, const std::vector<double>& potential,
                          SignConvention convention, double floor_fraction) {
  return hj_residual_impl(traj, potential, convention, floor_fraction);
}

TwoParticleResiduals two_particle_residuals(const Evolution& traj,
                                            const std::vector<double>& potential,
                                            double floor_fraction) {
  TwoParticleResiduals r;
  r.continuity = continuity_residual(traj, floor_fraction);
  r.hj_standard = hj_residual_impl(traj, potential, SignConvention::standard, floor_fraction);
  r.hj_flipped = hj_residual_impl(traj, potential, SignConvention::flipped, floor_fraction);
  return r;
}

double separability_residual(const WaveFunction& wf, double floor_fraction) {
  check_wf(wf);
  if (wf.dims != 2) throw std::invalid_argument("separability_residual: needs a 2D grid");
  const auto mp = split(wf, floor_fraction);
  const auto nn = static_cast<std::size_t>(wf.n);

  std::vector<double> u(nn, 0.0), v(nn, 0.0);
  auto fit_pass = [&]() {
    for (std::size_t i = 0; i < nn; ++i) {
      double acc = 0.0;
      double cnt = 0.0;
      for (std::size_t j = 0; j < nn; ++j) {
        const std::size_t idx = i * nn + j;
        if (mp.masked[idx]) continue;
        acc += mp.phase[idx] - v[j];
        cnt += 1.0;
      }
      if (cnt > 0.0) u[i] = acc / cnt;
    }
    for (std::size_t j = 0; j < nn; ++j) {
      double acc = 0.0;
      double cnt = 0.0;
      for (std::size_t i = 0; i < nn; ++i) {
        const std::size_t idx = i * nn + j;
        if (mp.masked[idx]) continue;
        acc += mp.phase[idx] - u[i];
        cnt += 1.0;
      }
      if (cnt > 0.0) v[j] = acc / cnt;
    }
  };
  double prev_ss = -1.0;
  for (int iter = 0; iter < 500; ++iter) {
    fit_pass();
    double ss = 0.0;
    for (std::size_t i = 0; i < nn; ++i)
      for (std::size_t j = 0; j < nn; ++j) {
        const std::size_t idx = i * nn + j;
        if (mp.masked[idx]) continue;
        const double r = mp.phase[idx] - u[i] - v[j];
        ss += r * r;
      }
    if (prev_ss >= 0.0 && std::abs(prev_ss - ss) <= 1e-15 * std::max(1.0, ss)) break;
    prev_ss = ss;
  }

  double num_acc = 0.0, den_acc = 0.0, mean_s = 0.0, count = 0.0;
  for (std::size_t idx = 0; idx < mp.phase.size(); ++idx) {
    if (mp.masked[idx]) continue;
    mean_s += mp.phase[idx];
    count += 1.0;
  }
  mean_s /= count;
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j) {
      const std::size_t idx = i * nn + j;
      if (mp.masked[idx]) continue;
      const double r = mp.phase[idx] - u[i] - v[j];
      num_acc += r * r;
      den_acc += (mp.phase[idx] - mean_s) * (mp.phase[idx] - mean_s);
    }
  if (!(den_acc > 0.0)) return 0.0;  // constant phase is trivially separable
  return std::sqrt(num_acc / den_acc);
}

WaveFunction project(const WaveFunction& wf, const PositionWindow& w) {
  check_wf(wf);
  if (wf.dims != 1) throw std::invalid_argument("project: 1D grids only");
  if (!(w.lo <= w.hi)) throw std::invalid_argument("project: empty position window");
  WaveFunction out = wf;
  std::size_t kept = 0;
  for (int i = 0; i < wf.n; ++i) {
    const double x = wf.coord(i);
    if (x < w.lo || x > w.hi) {
      out.psi[static_cast<std::size_t>(i)] = 0.0;
    } else {
      ++kept;
    }
  }
  if (kept == 0) throw std::invalid_argument("project: position window contains no grid point");
  return out;
}

WaveFunction project(const WaveFunction& wf, const MomentumWindow& w) {
  check_wf(wf);
  if (wf.dims != 1) throw std::invalid_argument("project: 1D grids only");
  if (!(w.lo <= w.hi)) throw std::invalid_argument("project: empty momentum window");
  const double k_nyq = std::numbers::pi / wf.dx;
  if (w.hi < -k_nyq || w.lo > k_nyq)
    throw std::invalid_argument("project: momentum window outside the Nyquist range");
  fft::cvec spec(wf.psi.begin(), wf.psi.end());
  fft::transform(spec, false);
  std::size_t kept = 0;
  for (int j = 0; j < wf.n; ++j) {
    int jj = j;
    if (jj > wf.n / 2) jj -= wf.n;
    const double k = kTau * jj / (wf.n * wf.dx);
    if (k < w.lo || k > w.hi) {
      spec[static_cast<std::size_t>(j)] = 0.0;
    } else {
      ++kept;
    }
  }
  if (kept == 0) throw std::invalid_argument("project: momentum window contains no mode");
  fft::transform(spec, true);
  WaveFunction out = wf;
  // The plane-wave basis phases are referenced to index 0, while coord(0) is
  // -L/2; the filter is diagonal in k, so the index convention cancels.
  std::copy(spec.begin(), spec.end(), out.psi.begin());
  return out;
}

WaveFunction project(const WaveFunction& wf, const Projector& p) {
  if (p.momentum) return project(wf, MomentumWindow{p.lo, p.hi});
  return project(wf, PositionWindow{p.lo, p.hi});
}

double commutator_gap(const WaveFunction& wf, const Projector& a, const Projector& b) {
  const auto ab = project(project(wf, b), a);
  const auto ba = project(project(wf, a), b);
  double diff = 0.0;
  for (std::size_t i = 0; i < wf.size(); ++i) diff += std::norm(ab.psi[i] - ba.psi[i]);
  const double base = norm(wf);
  return std::sqrt(diff * cell_measure(wf)) / base;
}

}  // namespace translab::qm
