#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flowcritic/envs/vec_env.hpp"
#include "flowcritic/flow/flow_critic.hpp"
#include "flowcritic/nn/adam.hpp"
#include "flowcritic/rl/config.hpp"
#include "flowcritic/rl/critics.hpp"
#include "flowcritic/rl/policy.hpp"
#include "flowcritic/rl/rollout.hpp"

namespace flowcritic::rl {

struct IterationMetrics {
  std::int64_t iteration = 0;
  std::int64_t env_steps = 0;
  double ep_return_mean = 0.0;
  double critic_loss = 0.0;
  double policy_objective = 0.0;
  double kappa_mean = 0.0;
  double weight_mean = 0.0;
  double policy_grad_norm = 0.0;
  double critic_grad_norm = 0.0;
  std::int64_t numeric_aborts = 0;
  bool aborted = false;
};

// One on-policy training loop: collect, build per-state targets / samples /
// weights, then K epochs of minibatch critic and policy updates.
class Trainer {
 public:
  explicit Trainer(TrainConfig config);

  IterationMetrics run_iteration();

  std::int64_t env_steps() const { return env_steps_; }
  std::int64_t iteration() const { return iteration_; }
  const TrainConfig& config() const { return config_; }
  GaussianPolicy& policy() { return policy_; }
  const GaussianPolicy& policy() const { return policy_; }
  envs::VecEnv& venv() { return venv_; }

  // Writes policy (and critic) checkpoints into dir.
  void save_checkpoints(const std::string& dir) const;

 private:
  void target_pass_flow(RolloutBuffer& buf);
  void target_pass_baseline(RolloutBuffer& buf);
  double critic_value(std::span<const double> obs) const;
  double critic_minibatch_update(RolloutBuffer& buf,
                                 std::span<const int> indices, int epoch,
                                 IterationMetrics& metrics);

  TrainConfig config_;
  envs::VecEnv venv_;
  GaussianPolicy policy_;
  nn::AdamState policy_mean_adam_;
  nn::AdamState policy_log_std_adam_;

  std::optional<flow::FlowCritic> flow_;
  std::optional<PointCritic> point_;
  std::optional<EnsembleCritic> ensemble_;
  std::optional<QuantileCritic> quantile_;
  std::vector<nn::AdamState> critic_adam_;

  std::vector<Rng> action_rngs_;
  Rng shuffle_rng_;
  std::int64_t iteration_ = 0;
  std::int64_t env_steps_ = 0;
  double last_ep_return_ = 0.0;
};

}  // namespace flowcritic::rl
