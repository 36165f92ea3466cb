#include "flowcritic/rl/rollout.hpp"

#include <algorithm>
#include <stdexcept>

namespace flowcritic::rl {

RolloutBuffer collect_rollouts(envs::VecEnv& venv, const GaussianPolicy& policy,
                               int rollout_len, std::span<Rng> action_rngs) {
  const int n = venv.num_envs();
  if (rollout_len <= 0)
    throw std::invalid_argument("collect_rollouts: rollout_len must be positive");
  if (static_cast<int>(action_rngs.size()) != n)
    throw std::invalid_argument("collect_rollouts: one action stream per env");
  if (venv.obs_dim() != policy.obs_dim() ||
      venv.action_dim() != policy.action_dim())
    throw std::invalid_argument("collect_rollouts: policy/env shape mismatch");

  RolloutBuffer buf;
  buf.num_envs = n;
  buf.rollout_len = rollout_len;
  buf.obs_dim = venv.obs_dim();
  buf.action_dim = venv.action_dim();
  const std::size_t total = buf.size();
  buf.states.resize(total * buf.obs_dim);
  buf.actions.resize(total * buf.action_dim);
  buf.rewards.resize(total);
  buf.log_probs.resize(total);
  buf.done.resize(total);
  buf.truncated.resize(total);
  buf.boot_states.resize(total * buf.obs_dim);

  std::vector<double> actions(static_cast<std::size_t>(n) * buf.action_dim);
  for (int t = 0; t < rollout_len; ++t) {
    const auto obs = venv.observations();
    for (int k = 0; k < n; ++k) {
      const std::size_t idx = buf.flat(k, t);
      const auto obs_k = obs.subspan(static_cast<std::size_t>(k) * buf.obs_dim,
                                     buf.obs_dim);
      std::copy(obs_k.begin(), obs_k.end(),
                buf.states.begin() + idx * buf.obs_dim);
      double logp = 0.0;
      const std::vector<double> a =
          policy.sample_action(obs_k, action_rngs[k], &logp);
      std::copy(a.begin(), a.end(),
                actions.begin() + static_cast<std::size_t>(k) * buf.action_dim);
      std::copy(a.begin(), a.end(), buf.actions.begin() + idx * buf.action_dim);
      buf.log_probs[idx] = logp;
    }

    venv.step(actions);

    const auto rewards = venv.rewards();
    const auto dones = venv.dones();
    const auto truncs = venv.truncations();
    const auto boot = venv.boot_observations();
    for (int k = 0; k < n; ++k) {
      const std::size_t idx = buf.flat(k, t);
      buf.rewards[idx] = rewards[k];
      buf.done[idx] = dones[k];
      buf.truncated[idx] = truncs[k];
      std::copy(boot.begin() + static_cast<std::size_t>(k) * buf.obs_dim,
                boot.begin() + static_cast<std::size_t>(k + 1) * buf.obs_dim,
                buf.boot_states.begin() + idx * buf.obs_dim);
    }
  }
  buf.completed_returns = venv.drain_completed_returns();
  return buf;
}

}  // namespace flowcritic::rl
