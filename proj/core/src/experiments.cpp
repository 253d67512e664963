#include "translab/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "translab/averaging.hpp"
#include "translab/fluctuation.hpp"
#include "translab/madelung.hpp"
#include "translab/multiscale.hpp"
#include "translab/numeric.hpp"
#include "translab/oscillator.hpp"

namespace translab::exp {

namespace {

using json = nlohmann::json;
constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("parameter '" + key + "': not a real number: " + value);
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("parameter '" + key + "': not an integer: " + value);
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_real(key, item));
  }
  if (out.empty()) throw ConfigError("parameter '" + key + "': empty list");
  return out;
}

// Helper bound to one run: typed parameter access plus artifact bookkeeping.
struct Ctx {
  const Config& cfg;
  RunRecord rec;

  explicit Ctx(const Config& c) : cfg(c) {
    rec.experiment = c.experiment;
    rec.seed = c.seed;
    rec.effective_params = c.params;
  }

  const std::string& raw(const std::string& key) const {
    const auto it = cfg.params.find(key);
    if (it == cfg.params.end()) throw ConfigError("missing parameter: " + key);
    return it->second;
  }
  double real(const std::string& key) const { return parse_real(key, raw(key)); }
  long long integer(const std::string& key) const { return parse_int(key, raw(key)); }
  std::vector<double> list(const std::string& key) const { return parse_list(key, raw(key)); }

  bool writing() const { return !cfg.out_dir.empty(); }
  std::string path(const std::string& name) {
    rec.artifacts.push_back(name);
    return (std::filesystem::path(cfg.out_dir) / name).string();
  }

  void check(const std::string& name, bool pass, double value, const std::string& detail = "") {
    rec.checks.push_back({name, pass, value, detail});
  }

  void save_text(const std::string& name, const std::string& body) {
    if (!writing()) return;
    std::ofstream os(path(name));
    if (!os) throw std::runtime_error("cannot write artifact: " + name);
    os << body;
  }

  void save_json(const std::string& name, const json& j) {
    if (!writing()) return;
    std::ofstream os(path(name));
    if (!os) throw std::runtime_error("cannot write artifact: " + name);
    os << j.dump(2) << "\n";
  }
};

struct CsvBuilder {
  std::string body;
  explicit CsvBuilder(const std::string& header) { body = header + "\n"; }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      body += cells[i];
      body += i + 1 == cells.size() ? '\n' : ',';
    }
  }
};

// --- experiments ----------------------------------------------------------

RunRecord run_connectivity_demo(const Config& cfg) {
  Ctx ctx(cfg);
  const double ni = ctx.real("n_interbonds");
  const double n1 = ctx.real("n1");
  const double n2 = ctx.real("n2");
  const double expected = ctx.real("expected_log10");

  const auto ratio = graph::connectivity_from_counts(ni, n1, n2);
  ctx.check("log10_connectivity", std::abs(ratio.log10_value - expected) <= 1e-9,
            ratio.log10_value, "expected " + fmt(expected));

  // spreading on a seeded sparse random graph: union count == sum of parts
  const auto g = graph::build_erdos_renyi(200, 0.05, cfg.seed);
  std::vector<graph::NodeId> target;
  std::vector<std::vector<graph::NodeId>> parts(4);
  for (graph::NodeId u = 0; u < 20; ++u) target.push_back(u);
  for (int p = 0; p < 4; ++p)
    for (graph::NodeId u = 0; u < 20; ++u)
      parts[static_cast<std::size_t>(p)].push_back(20 + static_cast<graph::NodeId>(p) * 20 + u);
  const auto spread = graph::spreading_statistic(g, target, parts);
  ctx.check("spreading_additive", spread.additive, static_cast<double>(spread.union_count));

  json report;
  report["log10_connectivity"] = ratio.log10_value;
  report["connectivity"] = ratio.value;
  report["spreading_union"] = spread.union_count;
  report["spreading_parts"] = spread.part_counts;
  report["spreading_relative_spread"] = spread.relative_spread;
  ctx.save_json("connectivity.json", report);
  return ctx.rec;
}

RunRecord run_clique_rg(const Config& cfg) {
  Ctx ctx(cfg);
  const auto n_graphs = ctx.integer("oracle_graphs");
  const auto max_nodes = static_cast<int>(ctx.integer("oracle_max_nodes"));
  const auto kn_max = static_cast<int>(ctx.integer("complete_n_max"));

  // clique enumerator against the exhaustive oracle
  CsvBuilder oracle_csv("graph,nodes,edges,cliques,match");
  std::mt19937_64 rng(cfg.seed);
  int matched = 0;
  for (long long i = 0; i < n_graphs; ++i) {
    const int n = 4 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_nodes - 3));
    const double p = 0.2 + 0.6 * static_cast<double>(rng() % 1000) / 1000.0;
    const auto g = graph::build_erdos_renyi(static_cast<graph::NodeId>(n), p, rng());
    const auto fast = graph::enumerate_max_cliques(g, 1);
    const auto slow = brute_force_max_cliques(g, 1);
    const bool ok = fast == slow;
    matched += ok ? 1 : 0;
    oracle_csv.row({std::to_string(i), std::to_string(n), std::to_string(g.edge_count()),
                    std::to_string(fast.size()), ok ? "1" : "0"});
  }
  ctx.check("clique_oracle", matched == n_graphs, static_cast<double>(matched),
            "graphs matching brute force");

  const auto pet = graph::enumerate_max_cliques(graph::petersen_graph(), 1);
  const bool pet_ok = pet.size() == 15 && std::all_of(pet.begin(), pet.end(), [](const auto& c) {
                        return c.members.size() == 2;
                      });
  ctx.check("petersen_cliques", pet_ok, static_cast<double>(pet.size()), "15 maximal 2-cliques");

  bool kn_ok = true;
  for (graph::NodeId n = 2; n <= static_cast<graph::NodeId>(kn_max); ++n) {
    const auto level = graph::clique_graph(graph::complete_graph(n), 1);
    kn_ok = kn_ok && level.graph.node_count() == 1 && level.graph.edge_count() == 0;
  }
  ctx.check("complete_graph_collapse", kn_ok, static_cast<double>(kn_max),
            "C(K_n) is a single node for n = 2..max");

  const auto c5 = graph::renormalize(graph::cycle_graph(5), 4, 1);
  const bool c5_ok = c5.status == graph::FixedPointStatus::found && c5.levels.size() <= 3;
  ctx.check("c5_fixed_point", c5_ok, static_cast<double>(c5.levels.size()),
            "fixed point within 2 iterations");

  // structurally dynamic step: graph file round-trip on a rewired lattice
  auto lattice = graph::build_lattice_with_shortcuts(8, 2, 0.1, cfg.seed);
  std::vector<double> phases(lattice.node_count());
  for (std::size_t i = 0; i < phases.size(); ++i)
    phases[i] = num::wrap_2pi(0.1 * static_cast<double>(i));
  lattice = graph::rewire_step(lattice, phases, kPi / 2.0, 0.5, cfg.seed + 1);
  std::ostringstream first;
  graph::write_graph(lattice, first);
  std::istringstream back(first.str());
  const auto reread = graph::read_graph(back);
  std::ostringstream second;
  graph::write_graph(reread, second);
  ctx.check("graph_file_roundtrip", first.str() == second.str(),
            static_cast<double>(first.str().size()), "bytes");

  const auto rg = graph::renormalize(lattice, 3, 1);
  CsvBuilder renorm_csv("level,nodes,edges");
  for (const auto& level : rg.levels)
    renorm_csv.row({std::to_string(level.level_index), std::to_string(level.graph.node_count()),
                    std::to_string(level.graph.edge_count())});

  ctx.save_text("clique_oracle.csv", oracle_csv.body);
  ctx.save_text("renorm_levels.csv", renorm_csv.body);
  if (ctx.writing()) graph::save_graph(lattice, ctx.path("lattice.graph"));
  return ctx.rec;
}

RunRecord run_sync_sweep(const Config& cfg) {
  Ctx ctx(cfg);

  // (a) two-oscillator locking against arcsin(delta_omega / 2 alpha)
  const double lock_t = ctx.real("locking_t_end");
  const double lock_dt = ctx.real("locking_dt");
  const std::vector<std::pair<double, double>> pairs = {
      {1.0, 0.1}, {1.0, 0.3}, {1.0, 0.5}, {1.0, 0.7}, {1.0, 0.9},
      {2.0, 0.15}, {2.0, 0.35}, {2.0, 0.55}, {2.0, 0.75}, {2.0, 0.95}};
  CsvBuilder lock_csv("alpha,delta_omega,predicted,simulated,error");
  double worst_lock = 0.0;
  for (const auto& [alpha, ratio] : pairs) {
    const double delta_omega = 2.0 * alpha * ratio;
    osc::OscillatorNetwork net;
    net.graph = graph::path_graph(2);
    net.theta = {0.0, 0.0};
    net.omega = {delta_omega / 2.0, -delta_omega / 2.0};
    net.coupling = alpha;
    const auto steps = static_cast<std::size_t>(std::llround(lock_t / lock_dt));
    const auto tr = osc::integrate(net, lock_dt, steps, osc::Method::rk4, steps);
    const double sim = num::wrap_pi(tr.theta.back()[0] - tr.theta.back()[1]);
    const double predicted = std::asin(ratio);
    const double err = std::abs(sim - predicted);
    worst_lock = std::max(worst_lock, err);
    lock_csv.row({fmt(alpha), fmt(delta_omega), fmt(predicted), fmt(sim), fmt(err)});
  }
  ctx.check("two_oscillator_locking", worst_lock <= 1e-3, worst_lock,
            "max |simulated - arcsin| over 10 pairs");

  // (b) outside the locking region the phase difference drifts
  {
    const double alpha = 1.0;
    const double delta_omega = 2.5;  // > 2 alpha
    osc::OscillatorNetwork net;
    net.graph = graph::path_graph(2);
    net.theta = {0.0, 0.0};
    net.omega = {delta_omega / 2.0, -delta_omega / 2.0};
    net.coupling = alpha;
    const double t_end = ctx.real("drift_t_end");
    const auto steps = static_cast<std::size_t>(std::llround(t_end / lock_dt));
    const auto tr = osc::integrate(net, lock_dt, steps, osc::Method::rk4, 1);
    // accumulate the unwrapped phase difference across snapshots
    double drift = 0.0;
    double prev = tr.theta.front()[0] - tr.theta.front()[1];
    for (std::size_t s = 1; s < tr.theta.size(); ++s) {
      const double cur = tr.theta[s][0] - tr.theta[s][1];
      drift += num::wrap_pi(cur - prev);
      prev = cur;
    }
    ctx.check("two_oscillator_drift", std::abs(drift) > 2.0 * kPi, std::abs(drift),
              "unwrapped drift over the run");
    CsvBuilder traj_csv("t,node,theta");
    const std::size_t stride = std::max<std::size_t>(1, tr.t.size() / 200);
    for (std::size_t s = 0; s < tr.t.size(); s += stride)
      for (std::size_t nidx = 0; nidx < 2; ++nidx)
        traj_csv.row({fmt(tr.t[s]), std::to_string(nidx), fmt(tr.theta[s][nidx])});
    ctx.save_text("twonode_trajectory.csv", traj_csv.body);
  }

  // (c) small-world ensemble against the p=0 control
  osc::SyncExperimentParams params;
  params.side = static_cast<int>(ctx.integer("side"));
  params.dims = static_cast<int>(ctx.integer("dims"));
  params.shortcut_prob = ctx.real("shortcut_prob");
  params.sigma_omega = ctx.real("sigma_omega");
  params.coupling = ctx.real("alpha");
  params.t_end = ctx.real("t_end");
  params.dt = ctx.real("dt");
  params.n_seeds = static_cast<int>(ctx.integer("seeds"));
  params.base_seed = cfg.seed;
  const auto rep = osc::sync_experiment(params);
  const double gain = rep.mean_r_shortcut - rep.mean_r_control;
  ctx.check("smallworld_sync_gain", gain > 0.2, gain,
            "mean final R(p) - R(0) over " + std::to_string(params.n_seeds) + " seeds");

  CsvBuilder r_csv("seed,r_shortcut,r_control");
  for (std::size_t s = 0; s < rep.r_shortcut.size(); ++s)
    r_csv.row({std::to_string(s), fmt(rep.r_shortcut[s]), fmt(rep.r_control[s])});
  ctx.save_text("sync_r.csv", r_csv.body);

  CsvBuilder corr_csv("r,c_shortcut,c_control");
  for (std::size_t b = 0; b < rep.corr_shortcut.size() && b < rep.corr_control.size(); ++b)
    corr_csv.row({fmt(rep.corr_shortcut[b].r_mean), fmt(rep.corr_shortcut[b].c_mean),
                  fmt(rep.corr_control[b].c_mean)});
  ctx.save_text("sync_corr.csv", corr_csv.body);

  json report;
  report["mean_r_shortcut"] = rep.mean_r_shortcut;
  report["mean_r_control"] = rep.mean_r_control;
  report["gain"] = gain;
  report["per_seed_r_shortcut"] = rep.r_shortcut;
  report["per_seed_r_control"] = rep.r_control;
  ctx.save_json("sync_report.json", report);
  return ctx.rec;
}

RunRecord run_vdp_averaging(const Config& cfg) {
  Ctx ctx(cfg);
  const double eps = ctx.real("epsilon");
  const double t_end = ctx.real("t_end");
  const double dt = ctx.real("dt");
  const double x0 = ctx.real("x0");

  // quadrature against the closed-form averaged drift (a/2)(1 - a^2/4)
  const auto p = avg::van_der_pol(eps);
  double worst_quad = 0.0;
  for (int i = 1; i <= 16; ++i) {
    const double a = 0.25 * i;
    const auto r = avg::averaged_rhs(p, a);
    worst_quad = std::max(worst_quad, std::abs(r.fbar_c - 0.5 * a * (1.0 - 0.25 * a * a)));
    worst_quad = std::max(worst_quad, std::abs(r.fbar_s));
  }
  ctx.check("averaged_drift_closed_form", worst_quad <= 1e-9, worst_quad,
            "max quadrature deviation on a in (0,4]");

  const auto cycles = avg::limit_cycle_amplitudes(p);
  const bool cycle_ok = cycles.size() == 1 && std::abs(cycles[0].amplitude - 2.0) <= 1e-9 &&
                        cycles[0].stable;
  ctx.check("limit_cycle_amplitude", cycle_ok,
            cycles.empty() ? 0.0 : cycles[0].amplitude, "stable root of the averaged drift");

  // full integration reaches the cycle
  const auto full = avg::integrate_full(p, x0, 0.0, dt, t_end);
  double tail_mean = 0.0;
  std::size_t tail_n = 0;
  for (std::size_t i = 0; i < full.t.size(); ++i) {
    if (full.t[i] < t_end - 20.0) continue;
    tail_mean += std::hypot(full.x[i], full.xdot[i]);
    ++tail_n;
  }
  tail_mean /= static_cast<double>(tail_n);
  ctx.check("envelope_reaches_cycle", std::abs(tail_mean - 2.0) <= 0.05, tail_mean,
            "mean envelope over the last 20 time units");

  // first-order averaging error scaling between eps and eps/2
  const auto err_full = avg::compare_full_vs_averaged(p, x0, 0.0, t_end, dt);
  const auto p_half = avg::van_der_pol(eps / 2.0);
  const auto err_half = avg::compare_full_vs_averaged(p_half, x0, 0.0, t_end, dt);
  const double ratio = err_full.max_error / err_half.max_error;
  ctx.check("averaging_error_ratio", ratio >= 1.5 && ratio <= 3.0, ratio,
            "max envelope error at eps over eps/2");

  // averaged trajectory against its closed form
  const double a0 = std::abs(x0);
  const auto slow = avg::integrate_slow(p, a0, 0.0, dt, t_end);
  double worst_closed = 0.0;
  for (std::size_t i = 0; i < slow.t.size(); ++i) {
    const double expect =
        2.0 / std::sqrt(1.0 + (4.0 / (a0 * a0) - 1.0) * std::exp(-eps * slow.t[i]));
    worst_closed = std::max(worst_closed, std::abs(slow.a[i] - expect));
  }
  ctx.check("averaged_amplitude_closed_form", worst_closed <= 1e-6, worst_closed,
            "logistic-type amplitude solution");

  CsvBuilder env_csv("t,a_full,a_averaged");
  const std::size_t stride = std::max<std::size_t>(1, full.t.size() / 400);
  for (std::size_t i = 0; i < full.t.size(); i += stride) {
    const double af = std::hypot(full.x[i], full.xdot[i]);
    const double as = i < slow.a.size() ? slow.a[i] : slow.a.back();
    env_csv.row({fmt(full.t[i]), fmt(af), fmt(as)});
  }
  ctx.save_text("envelope.csv", env_csv.body);

  // entrainment sweep of the forced oscillator
  const double forced_t = ctx.real("forced_t_end");
  struct Case {
    double amplitude, omega;
  };
  const std::vector<Case> sweep = {{0.0, 1.0}, {0.5, 1.001}, {0.2, 1.05}, {0.05, 1.3}};
  CsvBuilder sweep_csv("epsilon,A,Omega,locked,response_freq,max_error");
  std::vector<avg::EntrainmentReport> reports;
  for (const auto& c : sweep) {
    const auto r = avg::forced_response(eps, c.amplitude, c.omega, forced_t);
    reports.push_back(r);
    sweep_csv.row({fmt(eps), fmt(c.amplitude), fmt(c.omega), r.locked ? "1" : "0",
                   fmt(r.response_freq), fmt(std::abs(r.response_freq - c.omega))});
  }
  ctx.save_text("forced_sweep.csv", sweep_csv.body);
  ctx.check("forced_entrainment_locks", reports[1].locked, reports[1].response_freq,
            "A=0.5, Omega=1.001");
  ctx.check("forced_detuned_drifts", !reports[3].locked, reports[3].response_freq,
            "A=0.05, Omega=1.3");
  ctx.check("free_response_near_unity", std::abs(reports[0].response_freq - 1.0) <= 0.01,
            reports[0].response_freq, "A=0");
  return ctx.rec;
}

RunRecord run_fluct_scaling(const Config& cfg) {
  Ctx ctx(cfg);
  const auto ensemble_2d = static_cast<std::size_t>(ctx.integer("ensemble_2d"));
  const auto ensemble_3d = static_cast<std::size_t>(ctx.integer("ensemble_3d"));
  const int side_2d = static_cast<int>(ctx.integer("side_2d"));
  const int side_3d = static_cast<int>(ctx.integer("side_3d"));
  const auto radii_2d = ctx.list("radii_2d");
  const auto radii_3d = ctx.list("radii_3d");
  const int centers = static_cast<int>(ctx.integer("centers_per_field"));
  const auto w = fluct::Window::raised_cosine();

  struct Target {
    int dims;
    double alpha;
    double expect;
    double tol;
  };
  const std::vector<Target> targets = {
      {2, 0.0, 2.0, 0.1}, {2, 1.0, 1.0, 0.2}, {2, 2.0, 0.0, 0.2},
      {3, 1.0, 2.0, 0.2}, {3, 2.0, 1.0, 0.2}};

  std::vector<fluct::LatticeField> iid_2d;  // reused for the correlation integral
  for (const auto& target : targets) {
    const int side = target.dims == 2 ? side_2d : side_3d;
    const auto count = target.dims == 2 ? ensemble_2d : ensemble_3d;
    const auto& radii = target.dims == 2 ? radii_2d : radii_3d;
    std::vector<fluct::LatticeField> ensemble(count);
    num::parallel_for(count, [&](std::size_t i) {
      ensemble[i] = fluct::synthesize_field(
          target.dims, side, target.alpha,
          num::derive_seed(cfg.seed, 1000 * static_cast<std::uint64_t>(target.dims) +
                                        static_cast<std::uint64_t>(100.0 * target.alpha) + i));
    });
    const auto rep =
        fluct::variance_vs_radius(ensemble, w, radii, centers, num::derive_seed(cfg.seed, 77));
    const std::string label = "beta_dims" + std::to_string(target.dims) + "_alpha" +
                              std::to_string(static_cast<int>(target.alpha));
    ctx.check(label, std::abs(rep.beta - target.expect) <= target.tol, rep.beta,
              "expected " + fmt(target.expect) + " +- " + fmt(target.tol));

    CsvBuilder scaling_csv("R,variance,stderr");
    for (std::size_t r = 0; r < rep.radii.size(); ++r)
      scaling_csv.row({fmt(rep.radii[r]), fmt(rep.variance[r]), fmt(rep.variance_stderr[r])});
    ctx.save_text("scaling_" + label + ".csv", scaling_csv.body);
    if (target.dims == 2 && target.alpha == 0.0) iid_2d = std::move(ensemble);
  }

  // spectral round-trips in 1D
  for (const double alpha : {0.0, 2.0}) {
    const auto field =
        fluct::synthesize_field(1, static_cast<int>(ctx.integer("side_1d")), alpha,
                                num::derive_seed(cfg.seed, 31 + static_cast<std::uint64_t>(alpha)));
    const auto est = fluct::spectral_exponent(field, 0.25);
    ctx.check("alpha_roundtrip_" + std::to_string(static_cast<int>(alpha)),
              std::abs(est.alpha_hat - alpha) <= 0.3, est.alpha_hat,
              "stderr " + fmt(est.stderr_));
  }

  // correlation volume integral: iid stays at the single-site variance,
  // anticorrelated alpha=2 cancels
  {
    const std::array<int, 3> x{side_2d / 2, side_2d / 2, 0};
    std::vector<double> radii = {1.0, 2.0, 4.0, 8.0, 16.0};
    const auto rows_iid = fluct::correlation_volume_integral(iid_2d, x, radii);
    ctx.check("correlation_integral_iid", std::abs(rows_iid.back().relative - 1.0) <= 0.2,
              rows_iid.back().relative, "relative integral at the largest ball");

    std::vector<fluct::LatticeField> anti(ensemble_2d);
    num::parallel_for(ensemble_2d, [&](std::size_t i) {
      anti[i] = fluct::synthesize_field(2, side_2d, 2.0, num::derive_seed(cfg.seed, 5000 + i));
    });
    const auto rows_anti = fluct::correlation_volume_integral(anti, x, radii);
    ctx.check("correlation_integral_anticorrelated", std::abs(rows_anti.back().relative) <= 0.1,
              rows_anti.back().relative, "relative integral at the largest ball");

    CsvBuilder corr_csv("R,iid,anticorrelated");
    for (std::size_t r = 0; r < radii.size(); ++r)
      corr_csv.row({fmt(radii[r]), fmt(rows_iid[r].relative), fmt(rows_anti[r].relative)});
    ctx.save_text("correlation_integral.csv", corr_csv.body);
  }

  // block averaging with the CLT-preserving exponent keeps unit variance
  {
    std::vector<double> coarse_vars;
    for (std::size_t i = 0; i < std::min<std::size_t>(iid_2d.size(), 50); ++i) {
      const auto coarse = fluct::block_average(iid_2d[i], 4, 0.5);
      coarse_vars.push_back(coarse.sample_variance());
    }
    const double mean_var = num::mean(coarse_vars);
    ctx.check("block_average_clt", std::abs(mean_var - 1.0) <= 0.1, mean_var,
              "coarse variance under N^{-1/2} normalization");
  }
  return ctx.rec;
}

RunRecord run_madelung_residuals(const Config& cfg) {
  Ctx ctx(cfg);
  const int n_base = static_cast<int>(ctx.integer("grid_base"));
  const double box = ctx.real("box");
  const double sigma = ctx.real("sigma");
  const double dt_base = ctx.real("dt_base");
  const double t_end = ctx.real("t_end");
  const auto stride = static_cast<std::size_t>(ctx.integer("stride"));
  const int refinements = static_cast<int>(ctx.integer("refinements"));

  // free Gaussian refinement study
  std::vector<double> cont_rms, hj_std_rms, hj_flip_rms, dxs, dts;
  CsvBuilder res_csv("level,dx,dt,continuity_rms,hj_standard_rms,hj_flipped_rms");
  for (int level = 0; level <= refinements; ++level) {
    const int n = n_base << level;
    const double dx = box / n;
    const double dt = dt_base / (1 << level);
    const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
    const auto psi0 = qm::gaussian_packet(n, dx, 0.0, sigma, 0.0);
    const std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    const auto traj = qm::evolve(psi0, v, dt, steps, stride);
    const auto cont = qm::continuity_residual(traj, 1e-4);
    const auto hj_s = qm::hj_residual(traj, v, qm::SignConvention::standard, 1e-4);
    const auto hj_f = qm::hj_residual(traj, v, qm::SignConvention::flipped, 1e-4);
    cont_rms.push_back(cont.rms);
    hj_std_rms.push_back(hj_s.rms);
    hj_flip_rms.push_back(hj_f.rms);
    dxs.push_back(dx);
    dts.push_back(dt);
    res_csv.row({std::to_string(level), fmt(dx), fmt(dt), fmt(cont.rms), fmt(hj_s.rms),
                 fmt(hj_f.rms)});
    if (level == 0 && ctx.writing()) {
      const auto mp = qm::split(traj.snaps.back(), 1e-4);
      CsvBuilder snap_csv("x,re_psi,im_psi,R,S");
      for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        snap_csv.row({fmt(traj.snaps.back().coord(i)), fmt(traj.snaps.back().psi[idx].real()),
                      fmt(traj.snaps.back().psi[idx].imag()), fmt(mp.amplitude[idx]),
                      fmt(mp.masked[idx] ? 0.0 : mp.phase[idx])});
      }
      ctx.save_text("snapshot.csv", snap_csv.body);
    }
  }
  ctx.save_text("residuals.csv", res_csv.body);

  bool cont_ok = true, hj_ok = true;
  for (int level = 0; level < refinements; ++level) {
    const auto l = static_cast<std::size_t>(level);
    cont_ok = cont_ok && cont_rms[l] / cont_rms[l + 1] >= 3.0;
    hj_ok = hj_ok && hj_std_rms[l] / hj_std_rms[l + 1] >= 3.0;
  }
  ctx.check("continuity_second_order", cont_ok, cont_rms.front() / cont_rms.back(),
            "total residual reduction over refinements");
  ctx.check("hj_standard_refines", hj_ok, hj_std_rms.front() / hj_std_rms.back(),
            "standard-sign residual reduction");
  const double flip_floor = *std::min_element(hj_flip_rms.begin(), hj_flip_rms.end());
  ctx.check("hj_flipped_stays_o1", flip_floor >= 0.05, flip_floor,
            "flipped-sign residual stays finite under refinement");

  // quantum potential of the unit Gaussian at the origin
  {
    const double dx = ctx.real("vq_dx");
    const int n = 2048;
    std::vector<double> amp(static_cast<std::size_t>(n));
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
      const double x = (i - n / 2) * dx;
      amp[static_cast<std::size_t>(i)] = std::exp(-x * x / (4.0 * sigma * sigma));
    }
    const auto vq = qm::quantum_potential(amp, mask, 1, n, 1.0, dx);
    const double at0 = vq.values[static_cast<std::size_t>(n / 2)];
    ctx.check("quantum_potential_gaussian", std::abs(at0 - 0.25) <= 1e-4, at0,
              "V_q(0) for the unit Gaussian");
  }

  // two-particle: plane-wave continuity, product vs entangled separability
  {
    const int n = static_cast<int>(ctx.integer("two_grid"));
    const double dx = ctx.real("two_box") / n;
    const std::vector<double> v(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);

    const auto pw = qm::product_state(qm::plane_wave(n, dx, 2), qm::plane_wave(n, dx, -3));
    const auto traj = qm::evolve_two_particle(pw, v, 0.002, 8, 2);
    const auto cont = qm::continuity_residual(traj, 1e-4);
    ctx.check("two_particle_continuity", cont.max <= 1e-8, cont.max, "product of plane waves");

    auto moving = qm::product_state(qm::gaussian_packet(n, dx, -2.0, 1.0, 1.0),
                                    qm::gaussian_packet(n, dx, 2.0, 1.0, -0.5));
    const auto ev = qm::evolve_two_particle(moving, v, 0.002, 50, 25);
    const double sep_prod = qm::separability_residual(ev.snaps.back(), 1e-5);
    ctx.check("separability_product", sep_prod <= 1e-6, sep_prod, "moving product Gaussian");

    // symmetrized two-Gaussian with a quarter-turn relative phase
    qm::WaveFunction ent;
    ent.dims = 2;
    ent.n = n;
    ent.dx = dx;
    ent.m1 = ent.m2 = 1.0;
    ent.psi.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    auto g_at = [&](double x, double c) { return std::exp(-(x - c) * (x - c) / 4.0); };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double x1 = (i - n / 2) * dx;
        const double x2 = (j - n / 2) * dx;
        const double t1 = g_at(x1, -2.0) * g_at(x2, 2.0);
        const double t2 = g_at(x1, 2.0) * g_at(x2, -2.0);
        ent.psi[static_cast<std::size_t>(i) * n + j] = std::complex<double>(t1, t2);
      }
    qm::normalize(ent);
    const double sep_ent = qm::separability_residual(ent, 1e-5);
    ctx.check("separability_entangled", sep_ent >= 0.1, sep_ent, "symmetrized two-Gaussian");

    json two;
    two["continuity_max"] = cont.max;
    two["separability_product"] = sep_prod;
    two["separability_entangled"] = sep_ent;
    ctx.save_json("two_particle.json", two);
  }

  json report;
  report["dx"] = dxs;
  report["dt"] = dts;
  report["continuity_rms"] = cont_rms;
  report["hj_standard_rms"] = hj_std_rms;
  report["hj_flipped_rms"] = hj_flip_rms;
  ctx.save_json("residual_report.json", report);
  return ctx.rec;
}

RunRecord run_two_level_demo(const Config& cfg) {
  Ctx ctx(cfg);
  const int n = static_cast<int>(ctx.integer("grid"));
  const double dx = ctx.real("dx");

  std::vector<double> v0(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = 2.0 * kPi * i / n;
    v0[static_cast<std::size_t>(i)] = std::sin(x) + 0.5 * std::sin(2.0 * x + 1.0);
  }

  multiscale::TwoLevelParams params;
  params.rule = multiscale::MicroRule::translocal_mixing;
  params.mixing_rate = ctx.real("mixing_rate");
  params.shortcut_prob = ctx.real("shortcut_prob");
  params.graph_seed = cfg.seed;
  params.dt = ctx.real("dt");
  params.steps = static_cast<std::size_t>(ctx.integer("steps"));
  params.stride = static_cast<std::size_t>(ctx.integer("stride"));

  const auto kernel = multiscale::InfluenceKernel::gaussian(n, dx, ctx.real("kernel_sigma"));
  const auto rep = multiscale::two_level_demo(v0, kernel, params);
  ctx.check("chained_identity", rep.chained_identity_max <= 1e-6, rep.chained_identity_max,
            "translocal route vs local route");
  ctx.check("micro_rule_nonlocal", rep.micro_nonlocal_weight > 0.0, rep.micro_nonlocal_weight,
            "coupling weight beyond nearest neighbors");

  // identity kernels + diffusive rule: the two levels coincide
  multiscale::TwoLevelParams diff = params;
  diff.rule = multiscale::MicroRule::diffusion;
  const auto rep_id =
      multiscale::two_level_demo(v0, multiscale::InfluenceKernel::identity(n, dx), diff);
  ctx.check("identity_levels_coincide", rep_id.chained_identity_max <= 1e-8,
            rep_id.chained_identity_max, "identity kernel, diffusive micro rule");

  multiscale::TwoLevelParams frozen = params;
  frozen.rule = multiscale::MicroRule::static_field;
  const auto rep_static = multiscale::two_level_demo(v0, kernel, frozen);
  ctx.check("static_field_zero_residual", rep_static.macro_law_max <= 1e-10,
            rep_static.macro_law_max, "static micro field");

  if (ctx.writing()) multiscale::save_kernel(kernel, ctx.path("influence_kernel.txt"));
  CsvBuilder macro_csv("x,V_final");
  for (int i = 0; i < n; ++i)
    macro_csv.row({fmt(i * dx), fmt(rep.macro_final[static_cast<std::size_t>(i)])});
  ctx.save_text("macro_field.csv", macro_csv.body);

  json report;
  report["chained_identity_max"] = rep.chained_identity_max;
  report["macro_law_rms_timediff"] = rep.macro_law_rms;
  report["macro_law_max_timediff"] = rep.macro_law_max;
  report["micro_nonlocal_weight"] = rep.micro_nonlocal_weight;
  ctx.save_json("two_level.json", report);
  return ctx.rec;
}

RunRecord run_commutator_demo(const Config& cfg) {
  Ctx ctx(cfg);
  const int n = static_cast<int>(ctx.integer("grid"));
  const double box = ctx.real("box");
  const double dx = box / n;
  const auto psi = qm::gaussian_packet(n, dx, 0.0, ctx.real("sigma"), 0.0);

  const qm::Projector pos_half{false, 0.0, 0.5 * box};
  const qm::Projector pos_a{false, -5.0, 5.0};
  const qm::Projector pos_b{false, 2.0, 8.0};
  const qm::Projector mom_low{true, -1.0, 1.0};

  const double gap_self = qm::commutator_gap(psi, pos_a, pos_a);
  ctx.check("self_projector_commutes", gap_self <= 1e-14, gap_self, "A = B");

  const double gap_pos = qm::commutator_gap(psi, pos_a, pos_b);
  ctx.check("position_windows_commute", gap_pos <= 1e-12, gap_pos,
            "two multiplication operators");

  const double gap_mixed = qm::commutator_gap(psi, pos_half, mom_low);
  ctx.check("position_vs_momentum_gap", gap_mixed >= 1e-3, gap_mixed,
            "half-line window vs momentum low-pass");

  json report;
  report["gap_self"] = gap_self;
  report["gap_position_pair"] = gap_pos;
  report["gap_position_vs_momentum"] = gap_mixed;
  ctx.save_json("commutator.json", report);
  return ctx.rec;
}

RunRecord run_undulation_demo(const Config& cfg) {
  Ctx ctx(cfg);
  const double omega0 = ctx.real("omega0");
  const double a0 = ctx.real("carrier_amp");
  const double depth = ctx.real("mod_depth");
  const double mod_ratio = ctx.real("mod_freq_ratio");
  const double cutoff = ctx.real("cutoff") * omega0;
  const double periods = ctx.real("periods");
  const double dt = 2.0 * kPi / omega0 / ctx.real("samples_per_period");
  const auto samples = static_cast<std::size_t>(std::llround(periods * 2.0 * kPi / omega0 / dt));

  auto make_series = [&](auto&& fn) {
    std::vector<double> q(samples);
    for (std::size_t i = 0; i < samples; ++i) q[i] = fn(static_cast<double>(i) * dt);
    return q;
  };

  // pure carrier
  {
    const auto q = make_series([&](double t) { return a0 * std::sin(omega0 * t); });
    const auto d = osc::demodulate(q, dt, omega0, cutoff);
    double worst = 0.0;
    for (std::size_t i = 0; i < d.slow_amp.size(); ++i)
      worst = std::max({worst, std::abs(d.slow_amp[i]), std::abs(d.slow_phase[i])});
    ctx.check("pure_carrier_flat", worst <= 1e-3, worst, "max |a|, |theta|");
  }

  const double nu = mod_ratio * omega0;
  // amplitude modulation recovery
  {
    const auto q = make_series(
        [&](double t) { return (a0 + depth * std::sin(nu * t)) * std::sin(omega0 * t); });
    const auto d = osc::demodulate(q, dt, omega0, cutoff);
    double num_acc = 0.0, den_acc = 0.0;
    for (std::size_t i = 0; i < d.slow_amp.size(); ++i) {
      const double expect = depth * std::sin(nu * d.t[i]);
      num_acc += (d.slow_amp[i] - expect) * (d.slow_amp[i] - expect);
      den_acc += expect * expect;
    }
    const double rel = std::sqrt(num_acc / den_acc);
    ctx.check("amplitude_recovery", rel <= 0.05, rel, "relative L2 error");

    const auto sep = osc::scale_separation_check(d);
    ctx.check("scale_separation_modulated", sep.all_pass,
              sep.checks.front().ratio, "all ratios under the 0.1 factor");

    CsvBuilder demod_csv("t,slow_amp,slow_phase");
    for (std::size_t i = 0; i < d.t.size(); i += 8)
      demod_csv.row({fmt(d.t[i]), fmt(d.slow_amp[i]), fmt(d.slow_phase[i])});
    ctx.save_text("demodulation.csv", demod_csv.body);
  }

  // phase modulation recovery
  {
    const double phase_depth = ctx.real("phase_depth");
    const auto q = make_series(
        [&](double t) { return a0 * std::sin(omega0 * t + phase_depth * std::cos(nu * t)); });
    const auto d = osc::demodulate(q, dt, omega0, cutoff);
    double num_acc = 0.0, den_acc = 0.0;
    for (std::size_t i = 0; i < d.slow_phase.size(); ++i) {
      const double expect = phase_depth * std::cos(nu * d.t[i]);
      num_acc += (d.slow_phase[i] - expect) * (d.slow_phase[i] - expect);
      den_acc += expect * expect;
    }
    const double rel = std::sqrt(num_acc / den_acc);
    ctx.check("phase_recovery", rel <= 0.05, rel, "relative L2 error");
  }

  // modulation as deep as the carrier violates the separation inequalities
  {
    const auto q = make_series(
        [&](double t) { return (a0 + a0 * std::sin(nu * t)) * std::sin(omega0 * t); });
    const auto d = osc::demodulate(q, dt, omega0, cutoff);
    const auto sep = osc::scale_separation_check(d);
    ctx.check("scale_separation_depth_one_fails", !sep.all_pass, sep.checks.front().ratio,
              "amplitude ratio near 1");
  }
  return ctx.rec;
}

// --- registry --------------------------------------------------------------

const std::vector<ExperimentDef>& registry() {
  static const std::vector<ExperimentDef> defs = {
      {"connectivity_demo",
       "Interbond connectivity arithmetic in log space plus spreading additivity",
       "Evaluates the connectivity ratio n_interbonds/(n1*n2) in log space where the raw "
       "products overflow, and checks edge-count additivity over disjoint parts of a sparse "
       "random graph.",
       {{"n_interbonds", ParamType::real, "1e79", "interbond count between the two regions"},
        {"n1", ParamType::real, "1e75", "grain count of the first region"},
        {"n2", ParamType::real, "1e75", "grain count of the second region"},
        {"expected_log10", ParamType::real, "-71", "expected log10 of the ratio"}},
       run_connectivity_demo},
      {"clique_rg",
       "Maximal-clique enumeration oracle and clique-graph renormalization fixed points",
       "Runs the pivoting clique enumerator against exhaustive subset enumeration on a seeded "
       "random corpus, collapses complete graphs, detects the C5 fixed point, performs a "
       "structurally dynamic rewiring step and round-trips the graph file format.",
       {{"oracle_graphs", ParamType::integer, "100", "number of corpus graphs"},
        {"oracle_max_nodes", ParamType::integer, "12", "largest corpus graph"},
        {"complete_n_max", ParamType::integer, "8", "largest complete graph collapsed"}},
       run_clique_rg},
      {"sync_sweep",
       "Two-oscillator locking plus small-world synchronization ensemble",
       "Checks the locked phase difference against arcsin(delta_omega/(2 alpha)) inside the "
       "locking region, confirms drift outside it, and measures the order-parameter gain of a "
       "shortcut lattice over the p=0 control with identical seeds.",
       {{"side", ParamType::integer, "32", "lattice side"},
        {"dims", ParamType::integer, "2", "lattice dimension"},
        {"shortcut_prob", ParamType::real, "0.05", "translocal shortcut density"},
        {"sigma_omega", ParamType::real, "0.3", "frequency disorder"},
        {"alpha", ParamType::real, "2.0", "coupling strength"},
        {"t_end", ParamType::real, "100", "integration horizon"},
        {"dt", ParamType::real, "0.05", "integrator step"},
        {"seeds", ParamType::integer, "30", "ensemble size"},
        {"locking_t_end", ParamType::real, "60", "two-oscillator horizon"},
        {"locking_dt", ParamType::real, "0.01", "two-oscillator step"},
        {"drift_t_end", ParamType::real, "200", "drift confirmation horizon"}},
       run_sync_sweep},
      {"vdp_averaging",
       "Averaging method on the van der Pol oscillator, free and forced",
       "Compares the averaged drift against its closed form, extracts the limit cycle, runs the "
       "full oscillator onto the cycle, checks the first-order error scaling in epsilon, and "
       "sweeps the forced oscillator for entrainment.",
       {{"epsilon", ParamType::real, "0.1", "nonlinearity strength"},
        {"t_end", ParamType::real, "200", "integration horizon"},
        {"dt", ParamType::real, "0.01", "integrator step"},
        {"x0", ParamType::real, "0.5", "initial displacement"},
        {"forced_t_end", ParamType::real, "400", "forced-run horizon"}},
       run_vdp_averaging},
      {"fluct_scaling",
       "Windowed-variance scaling and spectral exponents of synthesized fields",
       "Synthesizes Gaussian fields with power-law spectra, fits the variance-vs-radius "
       "exponent against n - alpha, round-trips the spectral exponent estimator, and checks "
       "the correlation volume integral and block-averaging normalization.",
       {{"ensemble_2d", ParamType::integer, "150", "2D ensemble size"},
        {"ensemble_3d", ParamType::integer, "60", "3D ensemble size"},
        {"side_2d", ParamType::integer, "256", "2D lattice side"},
        {"side_3d", ParamType::integer, "64", "3D lattice side"},
        {"side_1d", ParamType::integer, "4096", "1D lattice side for round-trips"},
        {"radii_2d", ParamType::text, "4,6.5,10,16,26", "2D window radii"},
        {"radii_3d", ParamType::text, "3,4.5,7,10.5,16", "3D window radii"},
        {"centers_per_field", ParamType::integer, "8", "window centers per field"}},
       run_fluct_scaling},
      {"madelung_residuals",
       "Amplitude/phase residuals of unitary evolution, one and two particles",
       "Evolves a free Gaussian under Crank-Nicolson stepping, checks second-order decay of "
       "the continuity residual, adjudicates the two sign conventions of the phase equation, "
       "evaluates the quantum potential, and measures phase separability of product and "
       "entangled two-particle states.",
       {{"grid_base", ParamType::integer, "256", "coarsest grid"},
        {"box", ParamType::real, "40", "domain length"},
        {"sigma", ParamType::real, "1", "packet width"},
        {"dt_base", ParamType::real, "0.004", "coarsest step"},
        {"t_end", ParamType::real, "0.4", "evolution horizon"},
        {"stride", ParamType::integer, "5", "snapshot stride"},
        {"refinements", ParamType::integer, "2", "number of (dx, dt) halvings"},
        {"vq_dx", ParamType::real, "0.01", "grid step for the quantum potential check"},
        {"two_grid", ParamType::integer, "128", "two-particle grid per axis"},
        {"two_box", ParamType::real, "24", "two-particle domain length"}},
       run_madelung_residuals},
      {"two_level_demo",
       "Nonlocal micro dynamics under a local macroscopic law",
       "Evolves a micro field by translocal linear mixing, lifts it through a smoothing "
       "influence kernel, and verifies that the macro level obeys the local law dU/dt = Lap V "
       "while the micro coupling stays nonlocal.",
       {{"grid", ParamType::integer, "64", "micro grid size"},
        {"dx", ParamType::real, "0.2", "grid spacing"},
        {"kernel_sigma", ParamType::real, "0.6", "smoothing kernel width"},
        {"mixing_rate", ParamType::real, "1.0", "micro mixing rate"},
        {"shortcut_prob", ParamType::real, "0.2", "shortcut density of the mixing graph"},
        {"dt", ParamType::real, "0.001", "micro integrator step"},
        {"steps", ParamType::integer, "400", "micro steps"},
        {"stride", ParamType::integer, "10", "snapshot stride"}},
       run_two_level_demo},
      {"commutator_demo",
       "Non-commutativity of position and momentum window projections",
       "Applies position-window and momentum-window projections to a Gaussian packet in both "
       "orders and reports the normalized commutator gaps.",
       {{"grid", ParamType::integer, "512", "grid size"},
        {"box", ParamType::real, "40", "domain length"},
        {"sigma", ParamType::real, "1", "packet width"}},
       run_commutator_demo},
      {"undulation_demo",
       "Two-scale demodulation of carrier signals and separation checks",
       "Demodulates synthetic carrier signals with slow amplitude and phase modulations, "
       "checks the recovery accuracy, and evaluates the scale-separation inequalities for "
       "shallow and carrier-deep modulations.",
       {{"omega0", ParamType::real, "1.0", "carrier frequency"},
        {"carrier_amp", ParamType::real, "3.0", "carrier amplitude"},
        {"mod_depth", ParamType::real, "0.1", "amplitude modulation depth"},
        {"phase_depth", ParamType::real, "0.05", "phase modulation depth"},
        {"mod_freq_ratio", ParamType::real, "0.01", "modulation frequency over omega0"},
        {"cutoff", ParamType::real, "0.05", "low-pass cutoff over omega0"},
        {"periods", ParamType::real, "400", "carrier periods of data"},
        {"samples_per_period", ParamType::real, "40", "sampling density"}},
       run_undulation_demo},
  };
  return defs;
}

}  // namespace

std::vector<graph::Clique> brute_force_max_cliques(const graph::Graph& g, int min_size) {
  const auto n = g.node_count();
  if (n > 20) throw std::invalid_argument("brute_force_max_cliques: too many nodes");
  std::vector<std::uint32_t> cliques;
  for (std::uint32_t subset = 1; subset < (1u << n); ++subset) {
    bool is_clique = true;
    for (graph::NodeId u = 0; u < n && is_clique; ++u) {
      if (!(subset & (1u << u))) continue;
      for (graph::NodeId v = u + 1; v < n && is_clique; ++v) {
        if (!(subset & (1u << v))) continue;
        if (!g.has_edge(u, v)) is_clique = false;
      }
    }
    if (is_clique) cliques.push_back(subset);
  }
  std::vector<graph::Clique> out;
  for (const auto c : cliques) {
    bool maximal = true;
    for (const auto other : cliques)
      if (other != c && (other & c) == c) {
        maximal = false;
        break;
      }
    if (!maximal) continue;
    graph::Clique clique;
    for (graph::NodeId u = 0; u < n; ++u)
      if (c & (1u << u)) clique.members.push_back(u);
    if (clique.members.size() >= static_cast<std::size_t>(min_size)) out.push_back(std::move(clique));
  }
  std::sort(out.begin(), out.end());
  return out;
}

const std::vector<ExperimentDef>& catalog() { return registry(); }

const ExperimentDef* find_experiment(const std::string& name) {
  for (const auto& def : catalog())
    if (def.name == name) return &def;
  return nullptr;
}

Config parse_config_text(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line;
  std::string section;
  while (std::getline(is, line)) {
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header: " + line);
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key in line: " + line);
    if (section.empty()) {
      if (key == "experiment") {
        cfg.experiment = value;
      } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
      } else if (key == "out") {
        cfg.out_dir = value;
      } else {
        throw ConfigError("unknown top-level key: " + key);
      }
    } else {
      cfg.params[key] = value;
    }
  }
  if (cfg.experiment.empty()) throw ConfigError("config does not name an experiment");
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

void apply_override(Config& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--set expects key=value: " + assignment);
  std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    const std::string section = key.substr(0, dot);
    if (section != cfg.experiment)
      throw ConfigError("--set section '" + section + "' does not match experiment '" +
                        cfg.experiment + "'");
    key = key.substr(dot + 1);
  }
  if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "experiment") {
    throw ConfigError("the experiment cannot be changed by --set");
  } else {
    cfg.params[key] = value;
  }
}

std::string echo_config(const Config& cfg) {
  std::string out;
  out += "experiment = " + cfg.experiment + "\n";
  out += "seed = " + std::to_string(cfg.seed) + "\n";
  if (!cfg.out_dir.empty()) out += "out = " + cfg.out_dir + "\n";
  out += "\n[" + cfg.experiment + "]\n";
  for (const auto& [key, value] : cfg.params) out += key + " = " + value + "\n";
  return out;
}

RunRecord run_experiment(const Config& cfg) {
  const auto* def = find_experiment(cfg.experiment);
  if (def == nullptr) throw ConfigError("unknown experiment: " + cfg.experiment);

  Config effective = cfg;
  for (const auto& [key, value] : cfg.params) {
    const auto it = std::find_if(def->params.begin(), def->params.end(),
                                 [&](const ParamSpec& p) { return p.name == key; });
    if (it == def->params.end())
      throw ConfigError("unknown parameter for " + def->name + ": " + key);
    // type validation up front so bad configs fail before any work
    switch (it->type) {
      case ParamType::integer:
        parse_int(key, value);
        break;
      case ParamType::real:
        parse_real(key, value);
        break;
      case ParamType::text:
        break;
    }
  }
  for (const auto& spec : def->params)
    if (!effective.params.contains(spec.name)) effective.params[spec.name] = spec.default_value;

  if (!effective.out_dir.empty()) std::filesystem::create_directories(effective.out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec = def->run(effective);
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.all_pass = std::all_of(rec.checks.begin(), rec.checks.end(),
                             [](const Check& c) { return c.pass; });

  if (!effective.out_dir.empty()) {
    {
      std::ofstream os(std::filesystem::path(effective.out_dir) / "config_echo.ini");
      os << echo_config(effective);
      rec.artifacts.push_back("config_echo.ini");
    }
    json j;
    j["experiment"] = rec.experiment;
    j["seed"] = rec.seed;
    j["params"] = rec.effective_params;
    j["wall_seconds"] = rec.wall_seconds;
    j["all_pass"] = rec.all_pass;
    json checks = json::array();
    for (const auto& c : rec.checks)
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"detail", c.detail}});
    j["checks"] = checks;
    j["artifacts"] = rec.artifacts;
    std::ofstream os(std::filesystem::path(effective.out_dir) / "run_record.json");
    os << j.dump(2) << "\n";
  }
  return rec;
}

}  // namespace translab::exp
