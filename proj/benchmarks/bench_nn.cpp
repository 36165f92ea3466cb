#include <benchmark/benchmark.h>

#include <vector>

#include "flowcritic/common/rng.hpp"
#include "flowcritic/nn/adam.hpp"
#include "flowcritic/nn/mlp.hpp"

namespace {

using namespace flowcritic;

void BM_MlpForward(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  nn::Mlp net({8, width, width, 1}, nn::Activation::kRelu);
  Rng rng(1, 0);
  net.init_uniform(rng);
  std::vector<double> input(8);
  for (double& v : input) v = rng.gaussian();
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(input));
  }
}
BENCHMARK(BM_MlpForward)->Arg(64)->Arg(128)->Arg(512);

void BM_MlpForwardBackward(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  nn::Mlp net({8, width, width, 1}, nn::Activation::kRelu);
  Rng rng(2, 0);
  net.init_uniform(rng);
  std::vector<double> input(8);
  for (double& v : input) v = rng.gaussian();
  nn::ForwardTrace trace;
  const double dl[1] = {1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(input, trace));
    net.backward(trace, dl);
    net.zero_grad();
  }
}
BENCHMARK(BM_MlpForwardBackward)->Arg(64)->Arg(128)->Arg(512);

void BM_AdamStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> params(n, 0.1), grads(n, 0.01);
  nn::AdamState adam(n);
  for (auto _ : state) {
    nn::adam_step(params, grads, adam);
    for (double& g : grads) g = 0.01;
  }
}
BENCHMARK(BM_AdamStep)->Arg(1 << 12)->Arg(1 << 16);

}  // namespace
