#include "support/reference_ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "flowcritic/common/rng.hpp"
#include "flowcritic/envs/vec_env.hpp"
#include "flowcritic/nn/adam.hpp"
#include "flowcritic/nn/mlp.hpp"
#include "flowcritic/rl/policy.hpp"

namespace flowcritic::testing {

using flowcritic::Rng;

std::vector<ReferenceMetrics> run_reference_ppo(
    const ReferencePpoSettings& s, int iterations) {
  envs::VecEnv venv(s.env_name, s.num_envs, s.seed);
  const int obs_dim = venv.obs_dim();
  const int act_dim = venv.action_dim();
  const int N = s.num_envs;
  const int T = s.rollout_len;
  const int total = N * T;

  rl::GaussianPolicy policy(obs_dim, act_dim, s.actor_hidden);
  {
    Rng init(s.seed, streams::kPolicyInit);
    policy.init(init);
  }
  nn::AdamState policy_mean_adam(policy.mean_net().param_count(),
                                 s.learning_rate);
  nn::AdamState policy_log_std_adam(static_cast<std::size_t>(act_dim),
                                    s.learning_rate);

  std::vector<int> critic_layers{obs_dim};
  critic_layers.insert(critic_layers.end(), s.critic_hidden.begin(),
                       s.critic_hidden.end());
  critic_layers.push_back(1);
  nn::Mlp critic(critic_layers, nn::Activation::kRelu);
  {
    Rng init(s.seed, Rng::mix(streams::kCriticInit, 0));
    critic.init_uniform(init);
  }
  nn::AdamState critic_adam(critic.param_count(), s.learning_rate);

  std::vector<Rng> action_rngs;
  for (int k = 0; k < N; ++k)
    action_rngs.emplace_back(s.seed,
                             Rng::mix(streams::kAction, static_cast<std::uint64_t>(k)));
  Rng shuffle_rng(s.seed, streams::kShuffle);

  std::vector<ReferenceMetrics> out;
  std::int64_t env_steps = 0;
  double last_ep_return = 0.0;

  std::vector<double> states(static_cast<std::size_t>(total) * obs_dim);
  std::vector<double> boot_states(states.size());
  std::vector<double> actions(static_cast<std::size_t>(total) * act_dim);
  std::vector<double> rewards(total), log_probs(total);
  std::vector<std::uint8_t> done(total), truncated(total);

  for (int iter = 0; iter < iterations; ++iter) {
    ReferenceMetrics metrics;
    metrics.iteration = iter;

    // ---- rollout ----
    std::vector<double> step_actions(static_cast<std::size_t>(N) * act_dim);
    for (int t = 0; t < T; ++t) {
      const auto obs = venv.observations();
      for (int k = 0; k < N; ++k) {
        const std::size_t idx = static_cast<std::size_t>(k) * T + t;
        for (int d = 0; d < obs_dim; ++d)
          states[idx * obs_dim + d] = obs[static_cast<std::size_t>(k) * obs_dim + d];
        double logp = 0.0;
        const auto a = policy.sample_action(
            obs.subspan(static_cast<std::size_t>(k) * obs_dim, obs_dim),
            action_rngs[k], &logp);
        for (int d = 0; d < act_dim; ++d) {
          step_actions[static_cast<std::size_t>(k) * act_dim + d] = a[d];
          actions[idx * act_dim + d] = a[d];
        }
        log_probs[idx] = logp;
      }
      venv.step(step_actions);
      for (int k = 0; k < N; ++k) {
        const std::size_t idx = static_cast<std::size_t>(k) * T + t;
        rewards[idx] = venv.rewards()[k];
        done[idx] = venv.dones()[k];
        truncated[idx] = venv.truncations()[k];
        for (int d = 0; d < obs_dim; ++d)
          boot_states[idx * obs_dim + d] =
              venv.boot_observations()[static_cast<std::size_t>(k) * obs_dim + d];
      }
    }
    const auto completed = venv.drain_completed_returns();
    env_steps += static_cast<std::int64_t>(N) * T;

    // ---- values and bootstrap values ----
    std::vector<double> values(total), next_values(total);
    for (int i = 0; i < total; ++i)
      values[i] = critic.forward(
          std::span<const double>(states.data() + static_cast<std::size_t>(i) * obs_dim,
                                  obs_dim))[0];
    for (int i = 0; i < total; ++i) {
      const int t = i % T;
      if (done[i]) {
        next_values[i] = 0.0;
      } else if (truncated[i] || t == T - 1) {
        next_values[i] = critic.forward(std::span<const double>(
            boot_states.data() + static_cast<std::size_t>(i) * obs_dim, obs_dim))[0];
      } else {
        next_values[i] = values[i + 1];
      }
    }

    // ---- GAE and returns ----
    std::vector<double> advantages_raw(total);
    for (int k = 0; k < N; ++k) {
      double acc = 0.0;
      for (int t = T - 1; t >= 0; --t) {
        const int i = k * T + t;
        if (done[i] || truncated[i]) acc = 0.0;
        const double delta =
            rewards[i] + s.gamma * next_values[i] - values[i];
        acc = delta + s.gamma * s.lambda * acc;
        advantages_raw[i] = acc;
      }
    }
    std::vector<double> targets(total);
    for (int i = 0; i < total; ++i) targets[i] = advantages_raw[i] + values[i];

    std::vector<double> advantages = advantages_raw;
    if (s.advantage_normalization) {
      double mean = 0.0;
      for (double v : advantages) mean += v;
      mean /= static_cast<double>(total);
      double var = 0.0;
      for (double v : advantages) {
        const double d = v - mean;
        var += d * d;
      }
      const double std = std::sqrt(var / static_cast<double>(total));
      for (double& v : advantages) v = (v - mean) / (std + 1e-8);
    }

    // ---- epochs of minibatch updates ----
    std::vector<int> indices(total);
    std::iota(indices.begin(), indices.end(), 0);
    std::vector<int> bounds(s.minibatches + 1, 0);
    {
      const int base = total / s.minibatches;
      const int extra = total % s.minibatches;
      for (int c = 0; c < s.minibatches; ++c)
        bounds[c + 1] = bounds[c] + base + (c < extra ? 1 : 0);
    }

    int updates = 0;
    nn::ForwardTrace trace;
    for (int epoch = 0; epoch < s.epochs; ++epoch) {
      for (std::size_t i = static_cast<std::size_t>(total) - 1; i > 0; --i) {
        const std::size_t j = shuffle_rng.below(i + 1);
        std::swap(indices[i], indices[j]);
      }
      for (int c = 0; c < s.minibatches; ++c) {
        const int begin = bounds[c], end = bounds[c + 1];
        const double inv_batch = 1.0 / static_cast<double>(end - begin);

        // Critic: textbook squared-error regression on the returns.
        critic.zero_grad();
        double loss_sum = 0.0;
        for (int b = begin; b < end; ++b) {
          const int i = indices[b];
          const double v = critic.forward(
              std::span<const double>(states.data() + static_cast<std::size_t>(i) * obs_dim,
                                      obs_dim),
              trace)[0];
          const double err = v - targets[i];
          const double grad[1] = {2.0 * err};
          critic.backward(trace, grad);
          loss_sum += err * err;
        }
        critic.scale_grad(inv_batch);
        metrics.critic_grad_norm +=
            nn::clip_global_norm(critic.grads(), s.grad_norm);
        nn::adam_step(critic, critic_adam);
        metrics.critic_loss += loss_sum * inv_batch;

        // Policy: textbook clipped surrogate, unweighted.
        policy.zero_grad();
        double objective_sum = 0.0;
        for (int b = begin; b < end; ++b) {
          const int i = indices[b];
          const auto obs = std::span<const double>(
              states.data() + static_cast<std::size_t>(i) * obs_dim, obs_dim);
          const auto action = std::span<const double>(
              actions.data() + static_cast<std::size_t>(i) * act_dim, act_dim);
          const double logp_new = policy.log_prob_traced(obs, action, trace);
          const double ratio = std::exp(logp_new - log_probs[i]);
          const double adv = advantages[i];
          const double surr_unclipped = ratio * adv;
          const double surr_clipped =
              std::clamp(ratio, 1.0 - s.clip, 1.0 + s.clip) * adv;
          objective_sum += std::min(surr_unclipped, surr_clipped);
          if (surr_unclipped <= surr_clipped)
            policy.accumulate_log_prob_grad(trace, action,
                                            -adv * ratio * inv_batch);
        }
        metrics.policy_objective += objective_sum * inv_batch;
        metrics.policy_grad_norm += policy.clip_grad(s.grad_norm);
        policy.adam_update(policy_mean_adam, policy_log_std_adam);
        updates += 1;
      }
    }
    const double inv_updates = 1.0 / static_cast<double>(updates);
    metrics.critic_loss *= inv_updates;
    metrics.policy_objective *= inv_updates;
    metrics.policy_grad_norm *= inv_updates;
    metrics.critic_grad_norm *= inv_updates;

    if (!completed.empty()) {
      double sum = 0.0;
      for (double r : completed) sum += r;
      last_ep_return = sum / static_cast<double>(completed.size());
    }
    metrics.ep_return_mean = last_ep_return;
    metrics.env_steps = env_steps;
    out.push_back(metrics);
  }
  return out;
}

}  // namespace flowcritic::testing
