#pragma once

#include <functional>
#include <vector>

namespace translab::avg {

// Weakly nonlinear oscillator  x'' + x = epsilon * f(x, x', t).
struct OscillatorProblem {
  std::function<double(double x, double xdot, double t)> forcing;
  double epsilon = 0.0;
  bool autonomous = true;
};

OscillatorProblem van_der_pol(double epsilon);
OscillatorProblem forced_van_der_pol(double epsilon, double amplitude, double omega);

// Phase-plane polar coordinates: x = a sin(phi), x' = a cos(phi);
// theta = phi - t is the slow phase offset.
struct PolarState {
  double a = 0.0;
  double phi = 0.0;
  double theta = 0.0;
};

PolarState to_polar(double x, double xdot, double t = 0.0);
std::pair<double, double> from_polar(const PolarState& p);

struct SlowFlowRate {
  double da_dt = 0.0;
  double dtheta_dt = 0.0;
};

// Exact (unaveraged) slow-flow right-hand side:
//   a'     =  eps * f(a sin phi, a cos phi, t) * cos phi
//   theta' = -(eps/a) * f(a sin phi, a cos phi, t) * sin phi
SlowFlowRate slow_flow_rhs(const OscillatorProblem& p, double a, double phi, double t);

struct AveragedRate {
  double fbar_c = 0.0;
  double fbar_s = 0.0;
};

// One-period averages (fbar_c, fbar_s) = (1/2pi) Int f(a sin, a cos) (cos, sin) dphi.
// Periodic trapezoid rule with interval doubling to rel. tolerance 1e-10.
// For nonautonomous f the time argument is frozen at t_frozen.
AveragedRate averaged_rhs(const OscillatorProblem& p, double a, double t_frozen = 0.0);

struct LimitCycle {
  double amplitude = 0.0;
  bool stable = false;
};

// Positive roots of fbar_c on (0, a_max], bracketing scan + bisection to 1e-9.
std::vector<LimitCycle> limit_cycle_amplitudes(const OscillatorProblem& p, double a_max = 10.0,
                                               int scan_points = 512);

struct FullTrajectory {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> xdot;
};

struct SlowTrajectory {
  std::vector<double> t;
  std::vector<double> a;
  std::vector<double> theta;
};

// RK4 on the full second-order system. dt must stay <= 0.05 to resolve the
// unit carrier unless relax_guard is set.
FullTrajectory integrate_full(const OscillatorProblem& p, double x0, double v0, double dt, double t_end,
                              bool relax_guard = false);

// RK4 on the averaged system a' = eps*fbar_c(a), theta' = -(eps/a)*fbar_s(a).
SlowTrajectory integrate_slow(const OscillatorProblem& p, double a0, double theta0, double dt,
                              double t_end);

struct EnvelopeComparison {
  double max_error = 0.0;   // max |a_full - a_avg| on [0, min(T, 1/eps)]
  double horizon = 0.0;
};

// The full-trajectory envelope is the exact polar amplitude sqrt(x^2 + x'^2).
EnvelopeComparison compare_full_vs_averaged(const OscillatorProblem& p, double x0, double v0,
                                            double t_end, double dt = 0.01);

struct EntrainmentReport {
  bool locked = false;
  double response_freq = 0.0;  // angular frequency from zero crossings
  double drive_freq = 0.0;
};

// Forced van der Pol x'' + x = eps[(1-x^2)x' + A cos(Omega t)]; the response
// frequency is estimated from upward zero crossings over the last half of the
// run, and `locked` means it matches Omega within 1e-3.
EntrainmentReport forced_response(double epsilon, double amplitude, double omega, double t_end,
                                  double dt = 0.005);

}  // namespace translab::avg
