#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace translab::qm {

// Complex wavefunction on a periodic 1D grid (size n) or 2D configuration
// grid (n x n, row-major, psi[i1*n + i2]); hbar = 1 throughout. The grid is
// centered: x_i = (i - n/2) * dx.
struct WaveFunction {
  int dims = 1;
  int n = 0;
  double dx = 1.0;
  double m1 = 1.0;
  double m2 = 1.0;  // second-particle mass, 2D only

  std::vector<std::complex<double>> psi;

  std::size_t size() const { return psi.size(); }
  double coord(int i) const { return (i - n / 2) * dx; }
};

double norm(const WaveFunction& wf);
void normalize(WaveFunction& wf);

WaveFunction gaussian_packet(int n, double dx, double x0, double sigma, double k0, double mass = 1.0);
// k must be an integer multiple of 2pi/(n dx); pass the integer index.
WaveFunction plane_wave(int n, double dx, int k_index, double mass = 1.0);
// Product of two 1D factors on the n x n configuration grid.
WaveFunction product_state(const WaveFunction& a, const WaveFunction& b);

double mean_position(const WaveFunction& wf);      // 1D
double position_variance(const WaveFunction& wf);  // 1D

std::vector<double> harmonic_potential(int n, double dx, double m, double omega);

// Lowest eigenstate of the discrete Hamiltonian (inverse iteration), phase
// fixed real-positive at the density maximum.
WaveFunction ground_state(const std::vector<double>& potential, int n, double dx, double mass);

struct Evolution {
  std::vector<double> t;
  std::vector<WaveFunction> snaps;
};

// Crank-Nicolson (Cayley) stepping: exactly unitary up to the linear-solve
// roundoff. The accuracy guard dt <= dx^2 * m throws unless relax_guard.
Evolution evolve(const WaveFunction& psi0, const std::vector<double>& potential, double dt,
                 std::size_t steps, std::size_t stride = 1, bool relax_guard = false);

// Two 1D particles on the n x n grid; Strang-split Cayley steps along each
// axis, still exactly unitary. V is indexed like psi.
Evolution evolve_two_particle(const WaveFunction& psi0, const std::vector<double>& potential,
                              double dt, std::size_t steps, std::size_t stride = 1,
                              bool relax_guard = false);

// Amplitude/phase split psi = R e^{iS}. S is unwrapped along a BFS tree from
// the density maximum; sites with R < floor * max(R) are masked and excluded.
// unwrap_residual reports the worst loop-closure mismatch over non-tree
// edges (nonzero multiples of 2pi mean a genuine branch-cut failure).
struct MadelungPair {
  std::vector<double> amplitude;  // R
  std::vector<double> phase;      // S, unwrapped
  std::vector<std::uint8_t> masked;
  double unwrap_residual = 0.0;
};

MadelungPair split(const WaveFunction& wf, double floor_fraction = 1e-6);

struct MaskedGrid {
  std::vector<double> values;
  std::vector<std::uint8_t> masked;
};

// V_q = -(1/2m) Lap(R)/R with centered differences; the mask propagates to
// every site whose stencil touches a masked site.
MaskedGrid quantum_potential(const std::vector<double>& amplitude,
                             const std::vector<std::uint8_t>& masked, int dims, int n, double mass,
                             double dx);

struct ResidualNorms {
  double rms = 0.0;
  double max = 0.0;
  std::size_t points = 0;
};

// Residual of d/dt(R^2) + div(R^2 grad(S)/m) over the interior snapshots,
// centered differences in space and time. Spatial phase gradients use
// wrapped single-step differences, so no global unwrap enters.
ResidualNorms continuity_residual(const Evolution& traj, double floor_fraction = 1e-6);

enum class SignConvention {
  standard,  // dS/dt = -(grad S)^2/2m - V + (1/2m) Lap(R)/R
  flipped,   // dS/dt = -(grad S)^2/2m + V - (1/2m) Lap(R)/R
};

ResidualNorms hj_residual(const Evolution& traj, const std::vector<double>& potential,
                          SignConvention convention, double floor_fraction = 1e-6);

struct TwoParticleResiduals {
  ResidualNorms continuity;
  ResidualNorms hj_standard;
  ResidualNorms hj_flipped;
};

TwoParticleResiduals two_particle_residuals(const Evolution& traj,
                                            const std::vector<double>& potential,
                                            double floor_fraction = 1e-6);

// Best additive fit S(x1,x2) ~ S1(x1) + S2(x2) over unmasked sites
// (alternating least squares); returns |S - fit| / |S - mean(S)|.
double separability_residual(const WaveFunction& wf, double floor_fraction = 1e-6);

struct PositionWindow {
  double lo = 0.0;
  double hi = 0.0;
};

struct MomentumWindow {
  double lo = 0.0;
  double hi = 0.0;
};

WaveFunction project(const WaveFunction& wf, const PositionWindow& w);
WaveFunction project(const WaveFunction& wf, const MomentumWindow& w);

struct Projector {
  bool momentum = false;
  double lo = 0.0;
  double hi = 0.0;
};

WaveFunction project(const WaveFunction& wf, const Projector& p);

// |P_A P_B psi - P_B P_A psi| / |psi|
double commutator_gap(const WaveFunction& wf, const Projector& a, const Projector& b);

}  // namespace translab::qm
