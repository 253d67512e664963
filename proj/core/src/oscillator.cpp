#include "translab/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "translab/numeric.hpp"

namespace translab::osc {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

// Compressed adjacency with per-neighbor weights, built once per integration.
struct CoupledSystem {
  std::vector<std::size_t> offsets;
  std::vector<graph::NodeId> nbr;
  std::vector<double> weight;
  std::vector<double> omega;
  double alpha = 1.0;

  void rhs(const std::vector<double>& theta, std::vector<double>& dtheta) const {
    const std::size_t n = omega.size();
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e)
        acc += weight[e] * std::sin(theta[i] - theta[nbr[e]]);
      dtheta[i] = omega[i] - alpha * acc;
    }
  }
};

CoupledSystem compile(const OscillatorNetwork& net) {
  const std::size_t n = net.graph.node_count();
  CoupledSystem sys;
  sys.alpha = net.coupling;
  sys.omega = net.omega;
  sys.offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    sys.offsets[i + 1] = sys.offsets[i] + net.graph.neighbors(static_cast<graph::NodeId>(i)).size();
  sys.nbr.resize(sys.offsets[n]);
  sys.weight.resize(sys.offsets[n]);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t e = sys.offsets[i];
    for (const auto v : net.graph.neighbors(static_cast<graph::NodeId>(i))) {
      const auto key = graph::make_edge_key(static_cast<graph::NodeId>(i), v);
      double w = net.graph.edge_kind(key.first, key.second) == graph::EdgeKind::local
                     ? net.j_local
                     : net.j_translocal;
      if (const auto it = net.edge_weight.find(key); it != net.edge_weight.end()) w = it->second;
      sys.nbr[e] = v;
      sys.weight[e] = w;
      ++e;
    }
  }
  return sys;
}

}  // namespace

OscillatorNetwork make_network(graph::Graph g, double mean_omega, double sigma_omega,
                               double coupling, std::uint64_t seed) {
  OscillatorNetwork net;
  const std::size_t n = g.node_count();
  net.graph = std::move(g);
  net.coupling = coupling;
  net.theta.resize(n);
  net.omega.resize(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, kTau);
  for (std::size_t i = 0; i < n; ++i) net.omega[i] = mean_omega + sigma_omega * gauss(rng);
  for (std::size_t i = 0; i < n; ++i) net.theta[i] = uni(rng);
  return net;
}

PhaseTrajectory integrate(const OscillatorNetwork& net, double dt, std::size_t steps, Method method,
                          std::size_t stride, bool relax_guard) {
  const std::size_t n = net.graph.node_count();
  if (net.theta.size() != n || net.omega.size() != n)
    throw std::invalid_argument("integrate: state arrays must match the node count");
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (stride == 0) stride = 1;
  double omega_max = 0.0;
  for (const double w : net.omega) omega_max = std::max(omega_max, std::abs(w));
  if (dt * omega_max > 0.2 && !relax_guard)
    throw std::invalid_argument("integrate: dt*max|omega| > 0.2; pass relax_guard to override");

  const auto sys = compile(net);
  std::vector<double> theta = net.theta;  // integrated unwrapped
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

  PhaseTrajectory tr;
  auto store = [&](double t) {
    tr.t.push_back(t);
    auto& snap = tr.theta.emplace_back(theta);
    for (double& th : snap) th = num::wrap_2pi(th);
  };
  store(0.0);
  for (std::size_t s = 1; s <= steps; ++s) {
    if (method == Method::euler) {
      sys.rhs(theta, k1);
      for (std::size_t i = 0; i < n; ++i) theta[i] += dt * k1[i];
    } else {
      sys.rhs(theta, k1);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = theta[i] + 0.5 * dt * k1[i];
      sys.rhs(tmp, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = theta[i] + 0.5 * dt * k2[i];
      sys.rhs(tmp, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = theta[i] + dt * k3[i];
      sys.rhs(tmp, k4);
      for (std::size_t i = 0; i < n; ++i)
        theta[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if (s % stride == 0 || s == steps) store(static_cast<double>(s) * dt);
  }
  return tr;
}

OrderParameter order_parameter(std::span<const double> theta) {
  if (theta.empty()) throw std::invalid_argument("order_parameter: empty phase array");
  std::complex<double> acc(0.0, 0.0);
  for (const double th : theta) acc += std::complex<double>(std::cos(th), std::sin(th));
  acc /= static_cast<double>(theta.size());
  return {std::abs(acc), std::arg(acc)};
}

std::vector<CorrelationBin> pair_correlation(std::span<const double> theta, const graph::Graph& g,
                                             double bin_width, std::size_t budget,
                                             std::uint64_t seed) {
  if (!g.has_positions()) throw std::invalid_argument("pair_correlation: graph has no positions");
  if (theta.size() != g.node_count())
    throw std::invalid_argument("pair_correlation: phase array size mismatch");
  if (!(bin_width > 0.0)) throw std::invalid_argument("pair_correlation: bin_width must be positive");
  const std::size_t n = theta.size();
  const int side = g.lattice_side();
  const int dims = g.lattice_dims();

  auto pair_distance = [&](graph::NodeId i, graph::NodeId j) {
    const auto& a = g.position(i);
    const auto& b = g.position(j);
    double r2 = 0.0;
    for (int d = 0; d < dims; ++d) {
      int delta = std::abs(a[static_cast<std::size_t>(d)] - b[static_cast<std::size_t>(d)]);
      delta = std::min(delta, side - delta);
      r2 += static_cast<double>(delta) * static_cast<double>(delta);
    }
    return std::sqrt(r2);
  };

  std::map<std::size_t, CorrelationBin> bins;
  auto record = [&](graph::NodeId i, graph::NodeId j) {
    const double r = pair_distance(i, j);
    const auto b = static_cast<std::size_t>(r / bin_width);
    auto& bin = bins[b];
    bin.r_mean += r;
    bin.c_mean += std::cos(theta[i] - theta[j]);
    bin.pairs += 1;
  };

  const std::size_t total_pairs = n * (n - 1) / 2;
  if (n <= 2000 || total_pairs <= budget) {
    for (graph::NodeId i = 0; i < n; ++i)
      for (graph::NodeId j = i + 1; j < n; ++j) record(i, j);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<graph::NodeId> pick(0, static_cast<graph::NodeId>(n - 1));
    std::size_t sampled = 0;
    while (sampled < budget) {
      const auto i = pick(rng);
      const auto j = pick(rng);
      if (i == j) continue;
      record(i, j);
      ++sampled;
    }
  }

  std::vector<CorrelationBin> out;
  for (auto& [key, bin] : bins) {
    (void)key;
    bin.r_mean /= static_cast<double>(bin.pairs);
    bin.c_mean /= static_cast<double>(bin.pairs);
    out.push_back(bin);
  }
  return out;
}

SyncExperimentReport sync_experiment(const SyncExperimentParams& params) {
  if (!(params.sigma_omega >= 0.0)) throw std::invalid_argument("sync_experiment: sigma_omega >= 0");
  if (params.n_seeds < 1) throw std::invalid_argument("sync_experiment: need at least one seed");
  SyncExperimentReport rep;
  rep.r_shortcut.resize(static_cast<std::size_t>(params.n_seeds));
  rep.r_control.resize(static_cast<std::size_t>(params.n_seeds));
  const auto steps = static_cast<std::size_t>(std::llround(params.t_end / params.dt));

  std::vector<std::vector<CorrelationBin>> corr_s(static_cast<std::size_t>(params.n_seeds));
  std::vector<std::vector<CorrelationBin>> corr_c(static_cast<std::size_t>(params.n_seeds));

  num::parallel_for(static_cast<std::size_t>(params.n_seeds), [&](std::size_t si) {
    const std::uint64_t seed = num::derive_seed(params.base_seed, si);
    for (const bool control : {false, true}) {
      auto g = graph::build_lattice_with_shortcuts(params.side, params.dims,
                                                   control ? 0.0 : params.shortcut_prob, seed);
      // identical frequency and phase draws for both arms
      auto net = make_network(std::move(g), params.mean_omega, params.sigma_omega, params.coupling,
                              num::derive_seed(seed, 1));
      const auto tr = integrate(net, params.dt, steps, Method::rk4, steps, true);
      const auto& final_theta = tr.theta.back();
      const auto op = order_parameter(final_theta);
      auto corr = pair_correlation(final_theta, net.graph, 1.0, 500'000, seed);
      if (control) {
        rep.r_control[si] = op.r;
        corr_c[si] = std::move(corr);
      } else {
        rep.r_shortcut[si] = op.r;
        corr_s[si] = std::move(corr);
      }
    }
  });

  rep.mean_r_shortcut = num::mean(rep.r_shortcut);
  rep.mean_r_control = num::mean(rep.r_control);

  auto average_bins = [](const std::vector<std::vector<CorrelationBin>>& all) {
    std::vector<CorrelationBin> avg;
    if (all.empty()) return avg;
    const std::size_t nbins = all.front().size();
    for (std::size_t b = 0; b < nbins; ++b) {
      CorrelationBin bin;
      std::size_t have = 0;
      for (const auto& run : all) {
        if (b >= run.size()) continue;
        bin.r_mean += run[b].r_mean;
        bin.c_mean += run[b].c_mean;
        bin.pairs += run[b].pairs;
        ++have;
      }
      if (have == 0) continue;
      bin.r_mean /= static_cast<double>(have);
      bin.c_mean /= static_cast<double>(have);
      avg.push_back(bin);
    }
    return avg;
  };
  rep.corr_shortcut = average_bins(corr_s);
  rep.corr_control = average_bins(corr_c);
  return rep;
}

UndulationDecomposition demodulate(std::span<const double> q, double dt, double omega0,
                                   double cutoff) {
  if (!(dt > 0.0) || !(omega0 > 0.0)) throw std::invalid_argument("demodulate: dt, omega0 > 0");
  if (!(cutoff > 0.0) || cutoff >= omega0)
    throw std::invalid_argument("demodulate: cutoff must lie in (0, omega0)");
  const double period = kTau / omega0;
  if (dt > period / 10.0) throw std::invalid_argument("demodulate: undersampled carrier");
  if (static_cast<double>(q.size()) * dt < 20.0 * period)
    throw std::invalid_argument("demodulate: need at least 20 carrier periods");

  const std::size_t n = q.size();
  std::vector<double> in_phase(n), quad(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    in_phase[i] = 2.0 * q[i] * std::sin(omega0 * t);
    quad[i] = 2.0 * q[i] * std::cos(omega0 * t);
  }

  auto odd_window = [&](double span_t) {
    auto w = static_cast<std::size_t>(std::llround(span_t / dt));
    if (w < 3) w = 3;
    if (w % 2 == 0) ++w;
    return w;
  };
  // stage 1: one carrier period, enough to null the 2*omega0 image
  const std::size_t w1 = odd_window(period);
  const int p1 = 2;
  const auto i_fast = num::moving_average(in_phase, w1, p1);
  const auto q_fast = num::moving_average(quad, w1, p1);
  // stage 2: integer number of carrier periods sized from the cutoff
  const double periods = std::max(1.0, std::floor(0.05 * omega0 / cutoff));
  const std::size_t w2 = odd_window(periods * period);
  const int p2 = 3;
  const auto i_slow = num::moving_average(i_fast, w2, p2);
  const auto q_slow = num::moving_average(q_fast, w2, p2);

  // drop the filter transients at both ends
  const std::size_t margin = (w1 / 2) * static_cast<std::size_t>(p1) +
                             (w2 / 2) * static_cast<std::size_t>(p2) + 1;
  if (2 * margin + 16 >= n) throw std::invalid_argument("demodulate: series too short for the cutoff");

  UndulationDecomposition d;
  d.carrier_freq = omega0;
  d.dt = dt;
  d.valid_start = margin;
  const std::size_t m = n - 2 * margin;
  d.t.resize(m);
  d.slow_amp.resize(m);
  d.slow_phase.resize(m);
  d.fast_amp.resize(m);
  d.fast_phase.resize(m);

  double mean_env = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    mean_env += std::hypot(i_slow[margin + i], q_slow[margin + i]);
  mean_env /= static_cast<double>(m);
  d.carrier_amp = mean_env;

  double prev_slow = 0.0, prev_fast = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = margin + i;
    d.t[i] = static_cast<double>(j) * dt;
    const double env_slow = std::hypot(i_slow[j], q_slow[j]);
    const double env_fast = std::hypot(i_fast[j], q_fast[j]);
    d.slow_amp[i] = env_slow - d.carrier_amp;
    d.fast_amp[i] = env_fast - env_slow;
    double ph_slow = std::atan2(q_slow[j], i_slow[j]);
    double ph_fast = std::atan2(q_fast[j], i_fast[j]);
    if (i > 0) {
      ph_slow = prev_slow + num::wrap_pi(ph_slow - prev_slow);
      ph_fast = prev_fast + num::wrap_pi(ph_fast - prev_fast);
    }
    prev_slow = ph_slow;
    prev_fast = ph_fast;
    d.slow_phase[i] = ph_slow;
    d.fast_phase[i] = ph_fast - ph_slow;
  }

  double num_acc = 0.0, den_acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = margin + i;
    const double recon =
        (d.carrier_amp + d.slow_amp[i]) * std::sin(omega0 * d.t[i] + d.slow_phase[i]);
    num_acc += (q[j] - recon) * (q[j] - recon);
    den_acc += q[j] * q[j];
  }
  d.reconstruction_residual = den_acc > 0.0 ? std::sqrt(num_acc / den_acc) : 0.0;
  return d;
}

ScaleSeparationReport scale_separation_check(const UndulationDecomposition& d, double factor) {
  if (d.slow_amp.empty()) throw std::invalid_argument("scale_separation_check: empty decomposition");
  ScaleSeparationReport rep;
  const double a0 = std::max(d.carrier_amp, 1e-300);

  double max_a = 0.0, max_da = 0.0, max_rate = 0.0, max_phi = 0.0;
  for (std::size_t i = 0; i < d.slow_amp.size(); ++i) {
    max_a = std::max(max_a, std::abs(d.slow_amp[i]));
    max_da = std::max(max_da, std::abs(d.fast_amp[i]));
    max_phi = std::max(max_phi, std::abs(d.fast_phase[i]));
    if (i > 0)
      max_rate = std::max(max_rate, std::abs(d.slow_phase[i] - d.slow_phase[i - 1]) / d.dt);
  }
  const double elapsed = d.carrier_freq * (d.t.back() - d.t.front());

  rep.checks.push_back({"slow_amplitude_vs_carrier", max_a / a0, false});
  rep.checks.push_back({"fast_amplitude_vs_carrier", max_da / a0, false});
  rep.checks.push_back({"slow_phase_rate_vs_carrier", max_rate / d.carrier_freq, false});
  rep.checks.push_back({"fast_phase_vs_carrier_phase", max_phi / std::max(elapsed, 1e-300), false});
  rep.all_pass = true;
  for (auto& c : rep.checks) {
    c.pass = c.ratio <= factor;
    rep.all_pass = rep.all_pass && c.pass;
  }
  return rep;
}

}  // namespace translab::osc
