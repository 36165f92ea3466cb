#include <benchmark/benchmark.h>

#include <vector>

#include "flowcritic/analysis/particles.hpp"
#include "flowcritic/analysis/wasserstein.hpp"
#include "flowcritic/common/rng.hpp"
#include "flowcritic/rl/returns.hpp"

namespace {

using namespace flowcritic;

void BM_EmpiricalW1(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(7, 0);
  std::vector<double> x(n), y(n);
  for (double& v : x) v = rng.gaussian();
  for (double& v : y) v = 1.0 + rng.gaussian();
  for (auto _ : state) {
    benchmark::DoNotOptimize(analysis::empirical_w1(x, y));
  }
}
BENCHMARK(BM_EmpiricalW1)->Arg(512)->Arg(10000);

void BM_ApplyBellman(benchmark::State& state) {
  analysis::TabularDistMDP mdp;
  mdp.gamma = 0.9;
  mdp.reward = {1.0, -0.5, 0.25};
  mdp.transition = {{0.5, 0.25, 0.25}, {0.125, 0.75, 0.125}, {0.25, 0.25, 0.5}};
  Rng rng(8, 0);
  std::vector<analysis::ParticleDistribution> dists(3);
  for (auto& d : dists) {
    d.support.resize(512);
    for (double& v : d.support) v = rng.gaussian();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(analysis::apply_bellman(mdp, dists, rng));
  }
}
BENCHMARK(BM_ApplyBellman);

void BM_GaeScan(benchmark::State& state) {
  const int T = 1024;
  Rng rng(9, 0);
  std::vector<double> r(T), v(T), nv(T);
  std::vector<std::uint8_t> d(T, 0), tr(T, 0);
  for (int t = 0; t < T; ++t) {
    r[t] = rng.gaussian();
    v[t] = rng.gaussian();
    nv[t] = rng.gaussian();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        rl::gae_advantages(r, v, nv, d, tr, 0.99, 0.95));
  }
}
BENCHMARK(BM_GaeScan);

}  // namespace
