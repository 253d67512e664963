#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "translab/fft.hpp"
#include "translab/fluctuation.hpp"
#include "translab/graph.hpp"
#include "translab/madelung.hpp"
#include "translab/oscillator.hpp"

namespace {

using namespace translab;

void BM_CliqueEnumeration(benchmark::State& state) {
  const auto n = static_cast<graph::NodeId>(state.range(0));
  const auto g = graph::build_erdos_renyi(n, 0.3, 12345);
  for (auto _ : state) {
    auto cliques = graph::enumerate_max_cliques(g, 2);
    benchmark::DoNotOptimize(cliques);
  }
}
BENCHMARK(BM_CliqueEnumeration)->Arg(32)->Arg(64)->Arg(128);

void BM_CliqueGraphLattice(benchmark::State& state) {
  const auto g = graph::build_lattice_with_shortcuts(static_cast<int>(state.range(0)), 2, 0.1, 7);
  for (auto _ : state) {
    auto level = graph::clique_graph(g, 1);
    benchmark::DoNotOptimize(level);
  }
}
BENCHMARK(BM_CliqueGraphLattice)->Arg(8)->Arg(16);

void BM_KuramotoStep(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  auto net = osc::make_network(graph::build_lattice_with_shortcuts(side, 2, 0.05, 3), 0.0, 0.3,
                               2.0, 11);
  for (auto _ : state) {
    auto tr = osc::integrate(net, 0.05, 8, osc::Method::rk4, 8);
    benchmark::DoNotOptimize(tr);
  }
}
BENCHMARK(BM_KuramotoStep)->Arg(16)->Arg(32);

void BM_Fft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  fft::cvec data(n);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (auto& z : data) z = {uni(rng), uni(rng)};
  for (auto _ : state) {
    auto copy = data;
    fft::transform(copy, false);
    benchmark::DoNotOptimize(copy);
  }
}
BENCHMARK(BM_Fft)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 18);

void BM_FieldSynthesis2D(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto field = fluct::synthesize_field(2, side, 1.0, seed++);
    benchmark::DoNotOptimize(field);
  }
}
BENCHMARK(BM_FieldSynthesis2D)->Arg(128)->Arg(256);

void BM_WindowedSum(benchmark::State& state) {
  const auto field = fluct::synthesize_field(2, 256, 1.0, 9);
  const auto w = fluct::Window::raised_cosine();
  for (auto _ : state) {
    const double q = fluct::windowed_sum(field, w, static_cast<double>(state.range(0)),
                                         {128, 128, 0});
    benchmark::DoNotOptimize(q);
  }
}
BENCHMARK(BM_WindowedSum)->Arg(8)->Arg(32);

void BM_CrankNicolson1D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const double dx = 40.0 / n;
  const auto psi0 = qm::gaussian_packet(n, dx, 0.0, 1.0, 0.5);
  const std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  for (auto _ : state) {
    auto tr = qm::evolve(psi0, v, 0.5 * dx * dx, 16, 16);
    benchmark::DoNotOptimize(tr);
  }
}
BENCHMARK(BM_CrankNicolson1D)->Arg(256)->Arg(1024);

void BM_CrankNicolsonTwoParticle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const double dx = 24.0 / n;
  const auto psi0 = qm::product_state(qm::gaussian_packet(n, dx, -2.0, 1.0, 1.0),
                                      qm::gaussian_packet(n, dx, 2.0, 1.0, -0.5));
  const std::vector<double> v(psi0.size(), 0.0);
  for (auto _ : state) {
    auto tr = qm::evolve_two_particle(psi0, v, 0.002, 4, 4);
    benchmark::DoNotOptimize(tr);
  }
}
BENCHMARK(BM_CrankNicolsonTwoParticle)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
