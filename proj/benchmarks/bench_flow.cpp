#include <benchmark/benchmark.h>

#include <vector>

#include "flowcritic/common/rng.hpp"
#include "flowcritic/flow/flow_critic.hpp"

namespace {

using namespace flowcritic;

flow::FlowCritic make_critic(int state_dim, int width) {
  flow::FlowCritic critic(state_dim, {width, width}, nn::Activation::kRelu, 5,
                          0.2);
  Rng rng(3, 0);
  critic.init(rng);
  return critic;
}

void BM_EulerSample(benchmark::State& state) {
  auto critic = make_critic(4, static_cast<int>(state.range(0)));
  const std::vector<double> s = {0.1, -0.2, 0.4, 0.0};
  Rng rng(4, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(critic.euler_sample(s, rng.gaussian()));
  }
}
BENCHMARK(BM_EulerSample)->Arg(64)->Arg(128);

void BM_SampleValueSet(benchmark::State& state) {
  auto critic = make_critic(4, 128);
  const std::vector<double> s = {0.1, -0.2, 0.4, 0.0};
  Rng rng(5, 0);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(critic.sample_value_set(s, n, 1, rng));
  }
}
BENCHMARK(BM_SampleValueSet)->Arg(10)->Arg(50);

void BM_ClippedCfmLoss(benchmark::State& state) {
  auto critic = make_critic(4, 128);
  critic.snapshot_target();
  Rng rng(6, 0);
  std::vector<flow::FlowTrainingSample> batch;
  for (int i = 0; i < 128; ++i)
    batch.push_back(flow::make_training_sample(
        {rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian()},
        rng.gaussian(), rng.gaussian(), rng.uniform01()));
  for (auto _ : state) {
    benchmark::DoNotOptimize(critic.clipped_cfm_loss(batch));
  }
}
BENCHMARK(BM_ClippedCfmLoss);

}  // namespace
