#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "translab/graph.hpp"

namespace translab::osc {

// Kuramoto-type phase oscillators on a graph:
//   dtheta_i/dt = omega_i - alpha * sum_j J_ij sin(theta_i - theta_j)
// over graph neighbors j. Phases are stored wrapped to [0, 2pi).
struct OscillatorNetwork {
  graph::Graph graph;
  std::vector<double> theta;
  std::vector<double> omega;
  double coupling = 1.0;      // alpha
  double j_local = 1.0;       // weight of local edges
  double j_translocal = 1.0;  // weight of translocal edges
  // optional per-edge overrides (canonical keys), taking precedence
  std::map<graph::EdgeKey, double> edge_weight;
};

// omega_i = mean_omega + N(0, sigma_omega); theta_i uniform on [0, 2pi).
OscillatorNetwork make_network(graph::Graph g, double mean_omega, double sigma_omega,
                               double coupling, std::uint64_t seed);

enum class Method { euler, rk4 };

struct PhaseTrajectory {
  std::vector<double> t;
  std::vector<std::vector<double>> theta;  // one wrapped snapshot per stored step
};

// RK4 (default) or Euler integration. The stability guard dt*max|omega| <= 0.2
// throws unless relax_guard is set. Snapshots every `stride` steps (plus the
// initial and final states).
PhaseTrajectory integrate(const OscillatorNetwork& net, double dt, std::size_t steps,
                          Method method = Method::rk4, std::size_t stride = 1,
                          bool relax_guard = false);

struct OrderParameter {
  double r = 0.0;
  double phi = 0.0;
};

// Modulus and argument of the mean unit phasor N^{-1} sum e^{i theta_j}.
OrderParameter order_parameter(std::span<const double> theta);

struct CorrelationBin {
  double r_mean = 0.0;
  double c_mean = 0.0;  // <cos(theta_i - theta_j)> over pairs in the bin
  std::size_t pairs = 0;
};

// Pair correlation C(r) over periodic lattice distance bins. All pairs for
// N <= 2000; above that, `budget` seeded random pairs.
std::vector<CorrelationBin> pair_correlation(std::span<const double> theta, const graph::Graph& g,
                                             double bin_width, std::size_t budget = 2'000'000,
                                             std::uint64_t seed = 1);

struct SyncExperimentParams {
  int side = 32;
  int dims = 2;
  double shortcut_prob = 0.05;
  double mean_omega = 0.0;
  double sigma_omega = 0.3;
  double coupling = 2.0;
  double t_end = 100.0;
  double dt = 0.05;
  int n_seeds = 20;
  std::uint64_t base_seed = 12345;
};

struct SyncExperimentReport {
  std::vector<double> r_shortcut;  // per-seed final R with shortcuts
  std::vector<double> r_control;   // same seeds, shortcut_prob = 0
  double mean_r_shortcut = 0.0;
  double mean_r_control = 0.0;
  std::vector<CorrelationBin> corr_shortcut;  // averaged over seeds
  std::vector<CorrelationBin> corr_control;
};

// Shortcut ensemble vs p=0 control with identical seeds, frequencies and
// initial phases.
SyncExperimentReport sync_experiment(const SyncExperimentParams& params);

// Two-scale decomposition of q(t) ~ (A0 + a(t)) sin(omega0 t + theta(t)):
// quadrature demodulation plus zero-phase moving-average smoothing. Series
// cover the filter-valid interior [t||valid_start .. ] of the input.
struct UndulationDecomposition {
  double carrier_amp = 0.0;   // A0, mean envelope
  double carrier_freq = 0.0;  // omega0
  double dt = 0.0;
  std::size_t valid_start = 0;          // index into the original series
  std::vector<double> t;                // times of the retained samples
  std::vector<double> slow_amp;         // a(t), signed, relative to A0
  std::vector<double> slow_phase;       // theta(t)
  std::vector<double> fast_amp;         // deltaA(t): envelope minus slow part
  std::vector<double> fast_phase;       // phi(t): phase minus slow part
  double reconstruction_residual = 0.0; // rel. L2 of q - (A0+a) sin(w0 t + theta)
};

// Requires sample rate >= 10 carrier cycles^-1 and >= 20 carrier periods of
// data; cutoff must lie in (0, omega0).
UndulationDecomposition demodulate(std::span<const double> q, double dt, double omega0,
                                   double cutoff);

struct ScaleSeparationCheck {
  std::string name;
  double ratio = 0.0;
  bool pass = false;
};

struct ScaleSeparationReport {
  std::vector<ScaleSeparationCheck> checks;
  bool all_pass = false;
};

// Evaluates the separation ratios (slow amplitude / carrier amplitude, slow
// phase rate / carrier frequency, and the fast remainders) against `factor`.
ScaleSeparationReport scale_separation_check(const UndulationDecomposition& d, double factor = 0.1);

}  // namespace translab::osc
