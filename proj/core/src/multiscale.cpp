#include "translab/multiscale.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "translab/graph.hpp"

namespace translab::multiscale {

namespace {

void check_kernel(const InfluenceKernel& k) {
  if (k.n < 4) throw std::invalid_argument("kernel: grid too small");
  if (!(k.dx > 0.0)) throw std::invalid_argument("kernel: dx must be positive");
  if (k.matrix.size() != static_cast<std::size_t>(k.n) * static_cast<std::size_t>(k.n))
    throw std::invalid_argument("kernel: matrix size mismatch");
}

std::vector<double> laplacian(const std::vector<double>& f, double dx) {
  const std::size_t n = f.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    const std::size_t next = (i + 1) % n;
    out[i] = (f[next] - 2.0 * f[i] + f[prev]) / (dx * dx);
  }
  return out;
}

}  // namespace

InfluenceKernel InfluenceKernel::identity(int n, double dx) {
  InfluenceKernel k;
  k.n = n;
  k.dx = dx;
  k.matrix.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) k.at(i, i) = 1.0 / dx;
  return k;
}

InfluenceKernel InfluenceKernel::constant(int n, double dx, double value) {
  InfluenceKernel k;
  k.n = n;
  k.dx = dx;
  k.matrix.assign(static_cast<std::size_t>(n) * n, value);
  return k;
}

InfluenceKernel InfluenceKernel::two_peak(int n, double dx) {
  InfluenceKernel k;
  k.n = n;
  k.dx = dx;
  k.matrix.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    k.at(i, i) = 1.0 / dx;
    k.at(i, (i + n / 2) % n) = 1.0 / dx;
  }
  return k;
}

InfluenceKernel InfluenceKernel::gaussian(int n, double dx, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("kernel: sigma must be positive");
  InfluenceKernel k;
  k.n = n;
  k.dx = dx;
  k.matrix.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      int delta = std::abs(i - j);
      delta = std::min(delta, n - delta);
      const double d = delta * dx;
      k.at(i, j) = std::exp(-0.5 * d * d / (sigma * sigma));
      row_sum += k.at(i, j) * dx;
    }
    for (int j = 0; j < n; ++j) k.at(i, j) /= row_sum;
  }
  return k;
}

std::vector<double> lift(const std::vector<double>& micro, const InfluenceKernel& kernel) {
  check_kernel(kernel);
  if (micro.size() != static_cast<std::size_t>(kernel.n))
    throw std::invalid_argument("lift: field and kernel dimensions disagree");
  std::vector<double> out(micro.size(), 0.0);
  for (int x = 0; x < kernel.n; ++x) {
    double acc = 0.0;
    for (int y = 0; y < kernel.n; ++y) acc += kernel.at(x, y) * micro[static_cast<std::size_t>(y)];
    out[static_cast<std::size_t>(x)] = acc * kernel.dx;
  }
  return out;
}

TwoLevelReport two_level_demo(const std::vector<double>& v0, const InfluenceKernel& kernel,
                              const TwoLevelParams& params) {
  check_kernel(kernel);
  const auto n = static_cast<std::size_t>(kernel.n);
  if (v0.size() != n) throw std::invalid_argument("two_level_demo: field and kernel dimensions disagree");
  if (params.steps < 2 * params.stride)
    throw std::invalid_argument("two_level_demo: need at least three snapshots");
  const double dx = kernel.dx;

  // micro evolution matrix
  std::vector<double> mix(n * n, 0.0);
  double offband = 0.0, total = 0.0;
  if (params.rule == MicroRule::diffusion) {
    for (std::size_t i = 0; i < n; ++i) {
      mix[i * n + i] = -2.0 / (dx * dx);
      mix[i * n + (i + 1) % n] = 1.0 / (dx * dx);
      mix[i * n + (i + n - 1) % n] = 1.0 / (dx * dx);
    }
  } else if (params.rule == MicroRule::translocal_mixing) {
    const auto g = graph::build_lattice_with_shortcuts(kernel.n, 1, params.shortcut_prob,
                                                       params.graph_seed);
    for (graph::NodeId u = 0; u < g.node_count(); ++u) {
      const auto& nbrs = g.neighbors(u);
      mix[u * n + u] = -params.mixing_rate * static_cast<double>(nbrs.size());
      for (const auto v : nbrs) mix[u * n + v] = params.mixing_rate;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::size_t d = std::min((i + n - j) % n, (j + n - i) % n);
      total += std::abs(mix[i * n + j]);
      if (d > 1) offband += std::abs(mix[i * n + j]);
    }

  auto apply_mix = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += mix[i * n + j] * v[j];
      out[i] = acc;
    }
  };

  // kernel rows run through the discrete Laplacian in x: G = Lap_x F
  InfluenceKernel lap_kernel = kernel;
  for (int y = 0; y < kernel.n; ++y)
    for (int x = 0; x < kernel.n; ++x) {
      const int xp = (x + 1) % kernel.n;
      const int xm = (x + kernel.n - 1) % kernel.n;
      lap_kernel.at(x, y) = (kernel.at(xp, y) - 2.0 * kernel.at(x, y) + kernel.at(xm, y)) / (dx * dx);
    }

  // integrate [v; u] with du/dt = v (u is the accumulated micro field)
  std::vector<double> v = v0, u(n, 0.0);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  std::vector<std::vector<double>> snap_v, snap_u;
  std::vector<double> snap_t;
  auto store = [&](double t) {
    snap_t.push_back(t);
    snap_v.push_back(v);
    snap_u.push_back(u);
  };
  store(0.0);
  for (std::size_t s = 1; s <= params.steps; ++s) {
    // RK4 for v' = M v; u advances with the same stage averages of v
    apply_mix(v, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = v[i] + 0.5 * params.dt * k1[i];
    apply_mix(tmp, k2);
    std::vector<double> v_stage2 = tmp;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = v[i] + 0.5 * params.dt * k2[i];
    apply_mix(tmp, k3);
    std::vector<double> v_stage3 = tmp;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = v[i] + params.dt * k3[i];
    apply_mix(tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] += params.dt / 6.0 * (v[i] + 2.0 * v_stage2[i] + 2.0 * v_stage3[i] + tmp[i]);
      v[i] += params.dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if (s % params.stride == 0 || s == params.steps) store(static_cast<double>(s) * params.dt);
  }

  TwoLevelReport rep;
  rep.micro_nonlocal_weight = total > 0.0 ? offband / total : 0.0;

  // chained identity at every snapshot: (Lap_x F) v dx  vs  Lap_x (F v dx)
  for (std::size_t s = 0; s < snap_v.size(); ++s) {
    const auto route_a = lift(snap_v[s], lap_kernel);
    const auto route_b = laplacian(lift(snap_v[s], kernel), dx);
    for (std::size_t i = 0; i < n; ++i)
      rep.chained_identity_max = std::max(rep.chained_identity_max, std::abs(route_a[i] - route_b[i]));
  }

  // macro law dU/dt = Lap V with centered time differences of U = (Lap_x F) u dx
  double sum_sq = 0.0;
  std::size_t points = 0;
  for (std::size_t s = 1; s + 1 < snap_v.size(); ++s) {
    const double dt_snap = snap_t[s + 1] - snap_t[s];
    const auto u_next = lift(snap_u[s + 1], lap_kernel);
    const auto u_prev = lift(snap_u[s - 1], lap_kernel);
    const auto lap_v = laplacian(lift(snap_v[s], kernel), dx);
    for (std::size_t i = 0; i < n; ++i) {
      const double res = (u_next[i] - u_prev[i]) / (2.0 * dt_snap) - lap_v[i];
      sum_sq += res * res;
      rep.macro_law_max = std::max(rep.macro_law_max, std::abs(res));
      ++points;
    }
  }
  rep.macro_law_rms = points > 0 ? std::sqrt(sum_sq / static_cast<double>(points)) : 0.0;
  rep.macro_final = lift(snap_v.back(), kernel);
  return rep;
}

void write_kernel(const InfluenceKernel& kernel, std::ostream& os) {
  check_kernel(kernel);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", kernel.dx);
  os << kernel.n << " " << buf << "\n";
  for (int i = 0; i < kernel.n; ++i) {
    for (int j = 0; j < kernel.n; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", kernel.at(i, j));
      os << buf << (j + 1 == kernel.n ? "\n" : " ");
    }
  }
}

InfluenceKernel read_kernel(std::istream& is) {
  InfluenceKernel k;
  if (!(is >> k.n >> k.dx)) throw std::runtime_error("kernel file: bad header");
  k.matrix.resize(static_cast<std::size_t>(k.n) * k.n);
  for (auto& v : k.matrix)
    if (!(is >> v)) throw std::runtime_error("kernel file: truncated matrix");
  check_kernel(k);
  return k;
}

void save_kernel(const InfluenceKernel& kernel, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  write_kernel(kernel, os);
}

InfluenceKernel load_kernel(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for read: " + path);
  return read_kernel(is);
}

}  // namespace translab::multiscale
