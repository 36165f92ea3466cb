#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flowcritic/envs/vec_env.hpp"
#include "flowcritic/rl/policy.hpp"

namespace flowcritic::rl {

// One iteration's transitions over num_envs x rollout_len, flat index
// k * T + t, plus the per-state quantities filled in by the target pass.
struct RolloutBuffer {
  int num_envs = 0;
  int rollout_len = 0;
  int obs_dim = 0;
  int action_dim = 0;

  std::vector<double> states;       // N*T*obs_dim
  std::vector<double> actions;      // N*T*action_dim
  std::vector<double> rewards;      // N*T
  std::vector<double> log_probs;    // N*T, under the collecting policy
  std::vector<std::uint8_t> done;   // N*T
  std::vector<std::uint8_t> truncated;
  std::vector<double> boot_states;  // N*T*obs_dim, successor before reset

  // Filled by the target pass.
  std::vector<double> values;       // baseline used for GAE (V or V_trunc)
  std::vector<double> next_values;  // terminal-adjusted bootstrap values
  std::vector<double> advantages;         // training copy (maybe normalized)
  std::vector<double> advantages_raw;     // unnormalized
  std::vector<double> targets;      // R_hat or z_hat
  std::vector<double> kappa;        // CoV per state (flow critic only)
  std::vector<double> weights;      // normalized, sums to N*T
  std::vector<double> flow_z;       // per-state flow sample (flow critic)

  // Episode returns completed during collection.
  std::vector<double> completed_returns;

  std::size_t size() const {
    return static_cast<std::size_t>(num_envs) * rollout_len;
  }
  std::size_t flat(int env, int t) const {
    return static_cast<std::size_t>(env) * rollout_len + t;
  }
  std::span<const double> state(std::size_t flat_idx) const {
    return {states.data() + flat_idx * obs_dim, static_cast<std::size_t>(obs_dim)};
  }
  std::span<const double> boot_state(std::size_t flat_idx) const {
    return {boot_states.data() + flat_idx * obs_dim,
            static_cast<std::size_t>(obs_dim)};
  }
  std::span<const double> action(std::size_t flat_idx) const {
    return {actions.data() + flat_idx * action_dim,
            static_cast<std::size_t>(action_dim)};
  }
};

// Runs the policy for rollout_len steps in every instance. action_rngs must
// hold one persistent stream per environment instance.
RolloutBuffer collect_rollouts(envs::VecEnv& venv, const GaussianPolicy& policy,
                               int rollout_len, std::span<Rng> action_rngs);

}  // namespace flowcritic::rl
