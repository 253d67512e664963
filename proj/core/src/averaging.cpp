#include "translab/averaging.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace translab::avg {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTau = 2.0 * std::numbers::pi;
}  // namespace

OscillatorProblem van_der_pol(double epsilon) {
  OscillatorProblem p;
  p.epsilon = epsilon;
  p.autonomous = true;
  p.forcing = [](double x, double xdot, double) { return (1.0 - x * x) * xdot; };
  return p;
}

OscillatorProblem forced_van_der_pol(double epsilon, double amplitude, double omega) {
  OscillatorProblem p;
  p.epsilon = epsilon;
  p.autonomous = false;
  p.forcing = [amplitude, omega](double x, double xdot, double t) {
    return (1.0 - x * x) * xdot + amplitude * std::cos(omega * t);
  };
  return p;
}

PolarState to_polar(double x, double xdot, double t) {
  if (x == 0.0 && xdot == 0.0)
    throw std::invalid_argument("to_polar: phase undefined at the origin");
  PolarState s;
  s.a = std::hypot(x, xdot);
  s.phi = std::atan2(x, xdot);
  s.theta = s.phi - t;
  return s;
}

std::pair<double, double> from_polar(const PolarState& p) {
  return {p.a * std::sin(p.phi), p.a * std::cos(p.phi)};
}

SlowFlowRate slow_flow_rhs(const OscillatorProblem& p, double a, double phi, double t) {
  if (!(a > 0.0)) throw std::invalid_argument("slow_flow_rhs: amplitude must be positive");
  const double f = p.forcing(a * std::sin(phi), a * std::cos(phi), t);
  SlowFlowRate r;
  r.da_dt = p.epsilon * f * std::cos(phi);
  r.dtheta_dt = -(p.epsilon / a) * f * std::sin(phi);
  return r;
}

AveragedRate averaged_rhs(const OscillatorProblem& p, double a, double t_frozen) {
  if (!(a > 0.0)) throw std::invalid_argument("averaged_rhs: amplitude must be positive");
  // Periodic smooth integrand: trapezoid = midpoint-rich rectangle rule,
  // spectrally convergent; double until stable.
  auto evaluate = [&](int n) {
    double sc = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double phi = kTau * static_cast<double>(i) / static_cast<double>(n);
      const double f = p.forcing(a * std::sin(phi), a * std::cos(phi), t_frozen);
      sc += f * std::cos(phi);
      ss += f * std::sin(phi);
    }
    return std::pair<double, double>{sc / n, ss / n};
  };
  int n = 32;
  auto [c_prev, s_prev] = evaluate(n);
  for (; n <= (1 << 16); ) {
    n *= 2;
    auto [c, s] = evaluate(n);
    const double scale = std::max({std::abs(c), std::abs(s), 1e-30});
    if (std::abs(c - c_prev) <= 1e-10 * scale + 1e-14 &&
        std::abs(s - s_prev) <= 1e-10 * scale + 1e-14)
      return {c, s};
    c_prev = c;
    s_prev = s;
  }
  throw std::runtime_error("averaged_rhs: quadrature did not converge");
}

std::vector<LimitCycle> limit_cycle_amplitudes(const OscillatorProblem& p, double a_max,
                                               int scan_points) {
  if (!p.autonomous) throw std::invalid_argument("limit_cycle_amplitudes: autonomous systems only");
  auto fbar_c = [&](double a) { return averaged_rhs(p, a).fbar_c; };
  std::vector<LimitCycle> cycles;
  const double a_lo = a_max / static_cast<double>(scan_points);
  double prev_a = a_lo;
  double prev_f = fbar_c(prev_a);
  for (int i = 2; i <= scan_points; ++i) {
    const double a = a_max * static_cast<double>(i) / static_cast<double>(scan_points);
    const double f = fbar_c(a);
    if (prev_f == 0.0) {
      // grazing the axis exactly at a scan point; classify by neighbors
      cycles.push_back({prev_a, f < 0.0});
    } else if (prev_f * f < 0.0) {
      double lo = prev_a, hi = a, flo = prev_f;
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fbar_c(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (flo * fm < 0.0) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      const double root = 0.5 * (lo + hi);
      const double h = std::max(1e-6, 1e-6 * root);
      const double slope = (fbar_c(root + h) - fbar_c(std::max(root - h, 1e-12))) / (2.0 * h);
      cycles.push_back({root, slope < 0.0});
    }
    prev_a = a;
    prev_f = f;
  }
  return cycles;
}

namespace {

// one RK4 step of a 2-state system
template <typename Rhs>
void rk4_step2(Rhs&& rhs, double t, double dt, double& y0, double& y1) {
  double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
  rhs(t, y0, y1, k1a, k1b);
  rhs(t + 0.5 * dt, y0 + 0.5 * dt * k1a, y1 + 0.5 * dt * k1b, k2a, k2b);
  rhs(t + 0.5 * dt, y0 + 0.5 * dt * k2a, y1 + 0.5 * dt * k2b, k3a, k3b);
  rhs(t + dt, y0 + dt * k3a, y1 + dt * k3b, k4a, k4b);
  y0 += dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
  y1 += dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
}

}  // namespace

FullTrajectory integrate_full(const OscillatorProblem& p, double x0, double v0, double dt,
                              double t_end, bool relax_guard) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw std::invalid_argument("integrate_full: dt, t_end > 0");
  if (dt > 0.05 && !relax_guard)
    throw std::invalid_argument("integrate_full: dt > 0.05 does not resolve the carrier");
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  FullTrajectory tr;
  tr.t.reserve(steps + 1);
  tr.x.reserve(steps + 1);
  tr.xdot.reserve(steps + 1);
  double x = x0, v = v0;
  tr.t.push_back(0.0);
  tr.x.push_back(x);
  tr.xdot.push_back(v);
  auto rhs = [&](double t, double xx, double vv, double& dx, double& dv) {
    dx = vv;
    dv = -xx + p.epsilon * p.forcing(xx, vv, t);
  };
  for (std::size_t i = 0; i < steps; ++i) {
    rk4_step2(rhs, static_cast<double>(i) * dt, dt, x, v);
    tr.t.push_back(static_cast<double>(i + 1) * dt);
    tr.x.push_back(x);
    tr.xdot.push_back(v);
  }
  return tr;
}

SlowTrajectory integrate_slow(const OscillatorProblem& p, double a0, double theta0, double dt,
                              double t_end) {
  if (!(a0 > 0.0)) throw std::invalid_argument("integrate_slow: amplitude must be positive");
  if (!(dt > 0.0) || !(t_end > 0.0)) throw std::invalid_argument("integrate_slow: dt, t_end > 0");
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  SlowTrajectory tr;
  tr.t.reserve(steps + 1);
  tr.a.reserve(steps + 1);
  tr.theta.reserve(steps + 1);
  double a = a0, theta = theta0;
  tr.t.push_back(0.0);
  tr.a.push_back(a);
  tr.theta.push_back(theta);
  auto rhs = [&](double, double aa, double, double& da, double& dth) {
    const auto r = averaged_rhs(p, aa);
    da = p.epsilon * r.fbar_c;
    dth = -(p.epsilon / aa) * r.fbar_s;
  };
  for (std::size_t i = 0; i < steps; ++i) {
    rk4_step2(rhs, static_cast<double>(i) * dt, dt, a, theta);
    tr.t.push_back(static_cast<double>(i + 1) * dt);
    tr.a.push_back(a);
    tr.theta.push_back(theta);
  }
  return tr;
}

EnvelopeComparison compare_full_vs_averaged(const OscillatorProblem& p, double x0, double v0,
                                            double t_end, double dt) {
  if (p.epsilon < 0.0) throw std::invalid_argument("compare_full_vs_averaged: epsilon >= 0");
  EnvelopeComparison cmp;
  cmp.horizon = p.epsilon > 0.0 ? std::min(t_end, 1.0 / p.epsilon) : t_end;
  const auto full = integrate_full(p, x0, v0, dt, cmp.horizon);
  const auto start = to_polar(x0, v0);
  const auto slow = integrate_slow(p, start.a, start.theta, dt, cmp.horizon);
  for (std::size_t i = 0; i < full.t.size() && i < slow.t.size(); ++i) {
    const double a_full = std::hypot(full.x[i], full.xdot[i]);
    cmp.max_error = std::max(cmp.max_error, std::abs(a_full - slow.a[i]));
  }
  return cmp;
}

EntrainmentReport forced_response(double epsilon, double amplitude, double omega, double t_end,
                                  double dt) {
  if (epsilon > 0.3)
    throw std::invalid_argument("forced_response: epsilon must stay <= 0.3 (weak forcing)");
  const auto p = forced_van_der_pol(epsilon, amplitude, omega);
  const auto tr = integrate_full(p, 2.0, 0.0, dt, t_end);
  EntrainmentReport rep;
  rep.drive_freq = omega;
  // upward zero crossings over the final half of the run
  const std::size_t begin = tr.t.size() / 2;
  double first = -1.0, last = -1.0;
  std::size_t count = 0;
  for (std::size_t i = begin + 1; i < tr.t.size(); ++i) {
    if (tr.x[i - 1] <= 0.0 && tr.x[i] > 0.0) {
      const double frac = -tr.x[i - 1] / (tr.x[i] - tr.x[i - 1]);
      const double tc = tr.t[i - 1] + frac * dt;
      if (first < 0.0) first = tc;
      last = tc;
      ++count;
    }
  }
  if (count >= 2) {
    const double period = (last - first) / static_cast<double>(count - 1);
    rep.response_freq = kTau / period;
  }
  rep.locked = std::abs(rep.response_freq - omega) <= 1e-3;
  return rep;
}

}  // namespace translab::avg
