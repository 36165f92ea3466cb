#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Plain PPO with GAE, written straight-line with no weighting, sampling or
// distributional machinery anywhere in the pipeline. Shares only the
// numeric substrate (networks, Adam, RNG streams, environments) with the
// library so that, seed for seed, metric traces can be compared bit for
// bit against the trainer running critic=point, alpha=0.
namespace flowcritic::testing {

struct ReferenceMetrics {
  std::int64_t iteration = 0;
  std::int64_t env_steps = 0;
  double ep_return_mean = 0.0;
  double critic_loss = 0.0;
  double policy_objective = 0.0;
  double policy_grad_norm = 0.0;
  double critic_grad_norm = 0.0;
};

struct ReferencePpoSettings {
  std::string env_name = "pointmass";
  std::uint64_t seed = 0;
  double gamma = 0.99;
  double lambda = 0.95;
  double clip = 0.2;
  double learning_rate = 5e-4;
  double grad_norm = 1.0;
  bool advantage_normalization = true;
  int num_envs = 4;
  int rollout_len = 8;
  int epochs = 2;
  int minibatches = 2;
  std::vector<int> actor_hidden{16, 16};
  std::vector<int> critic_hidden{16, 16};
};

std::vector<ReferenceMetrics> run_reference_ppo(
    const ReferencePpoSettings& settings, int iterations);

}  // namespace flowcritic::testing
