#include "flowcritic/rl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <stdexcept>

#include "flowcritic/common/errors.hpp"
#include "flowcritic/common/parallel.hpp"
#include "flowcritic/flow/flow_critic.hpp"
#include "flowcritic/nn/checkpoint.hpp"
#include "flowcritic/rl/ppo.hpp"
#include "flowcritic/rl/returns.hpp"

namespace flowcritic::rl {

namespace {

std::vector<int> chunk_bounds(int total, int chunks) {
  // `chunks` contiguous pieces; the first `total % chunks` get one extra.
  std::vector<int> bounds(chunks + 1, 0);
  const int base = total / chunks;
  const int extra = total % chunks;
  for (int c = 0; c < chunks; ++c)
    bounds[c + 1] = bounds[c] + base + (c < extra ? 1 : 0);
  return bounds;
}

}  // namespace

Trainer::Trainer(TrainConfig config)
    : config_(std::move(config)),
      venv_(config_.env_name, config_.num_envs, config_.seed),
      policy_(venv_.obs_dim(), venv_.action_dim(), config_.actor_hidden),
      policy_mean_adam_(0, config_.learning_rate),
      policy_log_std_adam_(0, config_.learning_rate),
      shuffle_rng_(config_.seed, streams::kShuffle) {
  config_.validate();

  Rng policy_init(config_.seed, streams::kPolicyInit);
  policy_.init(policy_init);
  policy_mean_adam_ =
      nn::AdamState(policy_.mean_net().param_count(), config_.learning_rate);
  policy_log_std_adam_ = nn::AdamState(
      static_cast<std::size_t>(policy_.action_dim()), config_.learning_rate);

  const int obs_dim = venv_.obs_dim();
  switch (config_.critic_kind) {
    case CriticKind::kFlow: {
      flow_.emplace(obs_dim, config_.critic_hidden, nn::Activation::kRelu,
                    config_.euler_steps, config_.velocity_clip);
      Rng init(config_.seed, Rng::mix(streams::kCriticInit, 0));
      flow_->init(init);
      critic_adam_.emplace_back(flow_->velocity_net().param_count(),
                                config_.learning_rate);
      break;
    }
    case CriticKind::kPoint: {
      point_.emplace(obs_dim, config_.critic_hidden);
      Rng init(config_.seed, Rng::mix(streams::kCriticInit, 0));
      point_->init(init);
      critic_adam_.emplace_back(point_->net().param_count(),
                                config_.learning_rate);
      break;
    }
    case CriticKind::kAvgEnsemble:
    case CriticKind::kMinEnsemble: {
      const auto mode = config_.critic_kind == CriticKind::kAvgEnsemble
                            ? EnsembleMode::kAverage
                            : EnsembleMode::kMinimum;
      ensemble_.emplace(obs_dim, config_.critic_hidden, config_.ensemble_size,
                        mode);
      for (int j = 0; j < config_.ensemble_size; ++j) {
        Rng init(config_.seed, Rng::mix(streams::kCriticInit,
                                        static_cast<std::uint64_t>(j)));
        ensemble_->members()[j].init_uniform(init);
        critic_adam_.emplace_back(ensemble_->members()[j].param_count(),
                                  config_.learning_rate);
      }
      break;
    }
    case CriticKind::kQuantile: {
      quantile_.emplace(obs_dim, config_.critic_hidden, config_.num_quantiles,
                        config_.huber_kappa);
      Rng init(config_.seed, Rng::mix(streams::kCriticInit, 0));
      quantile_->init(init);
      critic_adam_.emplace_back(quantile_->net().param_count(),
                                config_.learning_rate);
      break;
    }
  }

  action_rngs_.reserve(config_.num_envs);
  for (int k = 0; k < config_.num_envs; ++k)
    action_rngs_.emplace_back(
        config_.seed, Rng::mix(streams::kAction, static_cast<std::uint64_t>(k)));
}

double Trainer::critic_value(std::span<const double> obs) const {
  switch (config_.critic_kind) {
    case CriticKind::kPoint:
      return point_->value(obs);
    case CriticKind::kAvgEnsemble:
    case CriticKind::kMinEnsemble:
      return ensemble_->value(obs);
    case CriticKind::kQuantile:
      return quantile_->value(obs);
    case CriticKind::kFlow:
      break;
  }
  throw std::logic_error("critic_value: flow critic uses the sampling path");
}

void Trainer::target_pass_flow(RolloutBuffer& buf) {
  const std::size_t total = buf.size();
  const int T = buf.rollout_len;

  // One stream per visited state: the first draw feeds the target sample
  // reused in every TD term, the next n draws form the value-sample set.
  buf.flow_z.resize(total);
  buf.values.resize(total);
  buf.kappa.resize(total);
  std::vector<double> boot_z(total, 0.0);
  std::vector<double> boot_value(total, 0.0);
  std::vector<std::uint8_t> need_boot(total, 0);
  for (std::size_t i = 0; i < total; ++i) {
    const int t = static_cast<int>(i) % T;
    need_boot[i] =
        (!buf.done[i] && (buf.truncated[i] || t == T - 1)) ? 1 : 0;
  }

  const auto iter_tag = static_cast<std::uint64_t>(iteration_);
  parallel_for(total, [&](std::size_t i) {
    Rng rng(config_.seed, Rng::mix(streams::kFlowSample, iter_tag, i));
    buf.flow_z[i] = flow_->euler_sample(buf.state(i), rng.gaussian());
    const flow::ValueSampleSet set = flow_->sample_value_set(
        buf.state(i), config_.n_value_samples, config_.truncation, rng);
    buf.values[i] = set.truncated_value;
    buf.kappa[i] = set.cov;
  });
  parallel_for(total, [&](std::size_t i) {
    if (!need_boot[i]) return;
    Rng rng(config_.seed,
            Rng::mix(streams::kFlowSample, iter_tag, total + i));
    boot_z[i] = flow_->euler_sample(buf.boot_state(i), rng.gaussian());
    const flow::ValueSampleSet set = flow_->sample_value_set(
        buf.boot_state(i), config_.n_value_samples, config_.truncation, rng);
    boot_value[i] = set.truncated_value;
  });

  // Terminal-adjusted successors for both recursions.
  buf.next_values.resize(total);
  std::vector<double> next_z(total);
  for (int k = 0; k < buf.num_envs; ++k) {
    for (int t = 0; t < T; ++t) {
      const std::size_t i = buf.flat(k, t);
      if (buf.done[i]) {
        next_z[i] = 0.0;
        buf.next_values[i] = 0.0;
      } else if (need_boot[i]) {
        next_z[i] = boot_z[i];
        buf.next_values[i] = boot_value[i];
      } else {
        next_z[i] = buf.flow_z[i + 1];
        buf.next_values[i] = buf.values[i + 1];
      }
    }
  }

  // Distributional return targets, one backward scan per environment.
  buf.targets.resize(total);
  std::vector<double> zeta(T);
  std::vector<std::uint8_t> boundary(T);
  for (int k = 0; k < buf.num_envs; ++k) {
    const std::size_t row = buf.flat(k, 0);
    for (int t = 0; t < T; ++t) {
      const std::size_t i = row + t;
      zeta[t] = dist_td_sample(buf.rewards[i], config_.gamma, next_z[i],
                               buf.flow_z[i]);
      boundary[t] = (buf.done[i] || buf.truncated[i]) ? 1 : 0;
    }
    const std::vector<double> z_hat = dist_return_target(
        zeta, boundary, config_.gamma * config_.lambda,
        std::span<const double>(buf.flow_z.data() + row, T));
    std::copy(z_hat.begin(), z_hat.end(), buf.targets.begin() + row);
  }
}

void Trainer::target_pass_baseline(RolloutBuffer& buf) {
  const std::size_t total = buf.size();
  const int T = buf.rollout_len;

  buf.values.resize(total);
  buf.next_values.resize(total);
  buf.kappa.assign(total, 0.0);
  parallel_for(total, [&](std::size_t i) {
    buf.values[i] = critic_value(buf.state(i));
  });
  std::vector<double> boot_value(total, 0.0);
  parallel_for(total, [&](std::size_t i) {
    const int t = static_cast<int>(i) % T;
    if (!buf.done[i] && (buf.truncated[i] || t == T - 1))
      boot_value[i] = critic_value(buf.boot_state(i));
  });
  for (std::size_t i = 0; i < total; ++i) {
    const int t = static_cast<int>(i) % T;
    if (buf.done[i])
      buf.next_values[i] = 0.0;
    else if (buf.truncated[i] || t == T - 1)
      buf.next_values[i] = boot_value[i];
    else
      buf.next_values[i] = buf.values[i + 1];
  }
}

double Trainer::critic_minibatch_update(RolloutBuffer& buf,
                                        std::span<const int> indices, int epoch,
                                        IterationMetrics& metrics) {
  const double inv_batch = 1.0 / static_cast<double>(indices.size());
  double loss = 0.0;

  if (config_.critic_kind == CriticKind::kFlow) {
    const auto iter_tag = static_cast<std::uint64_t>(iteration_);
    std::vector<flow::FlowTrainingSample> batch;
    batch.reserve(indices.size());
    for (int idx : indices) {
      const std::size_t i = static_cast<std::size_t>(idx);
      // Fresh prior draw and fresh path time for every sample each epoch.
      Rng rng(config_.seed,
              Rng::mix(streams::kFlowPath, iter_tag,
                       static_cast<std::uint64_t>(epoch), i));
      const double eps = rng.gaussian();
      const double t = rng.uniform01();
      const auto s = buf.state(i);
      batch.push_back(flow::make_training_sample(
          std::vector<double>(s.begin(), s.end()), eps, buf.targets[i], t));
    }
    loss = flow_->clipped_cfm_loss(batch);
    metrics.critic_grad_norm +=
        nn::clip_global_norm(flow_->velocity_net().grads(), config_.grad_norm);
    if (!nn::adam_step(flow_->velocity_net(), critic_adam_[0]))
      metrics.numeric_aborts += 1;
    return loss;
  }

  auto update_net = [&](nn::Mlp& net, nn::AdamState& adam, auto&& per_sample) {
    net.zero_grad();
    double sum = 0.0;
    for (int idx : indices) sum += per_sample(static_cast<std::size_t>(idx));
    net.scale_grad(inv_batch);
    metrics.critic_grad_norm +=
        nn::clip_global_norm(net.grads(), config_.grad_norm);
    if (!nn::adam_step(net, adam)) metrics.numeric_aborts += 1;
    return sum * inv_batch;
  };

  switch (config_.critic_kind) {
    case CriticKind::kPoint:
      loss = update_net(point_->net(), critic_adam_[0], [&](std::size_t i) {
        return point_->accumulate_loss(buf.state(i), buf.targets[i]);
      });
      break;
    case CriticKind::kAvgEnsemble:
    case CriticKind::kMinEnsemble: {
      double total_loss = 0.0;
      for (int j = 0; j < config_.ensemble_size; ++j) {
        nn::Mlp& net = ensemble_->members()[j];
        total_loss +=
            update_net(net, critic_adam_[j], [&](std::size_t i) {
              nn::ForwardTrace trace;
              const double v = net.forward(buf.state(i), trace)[0];
              const double err = v - buf.targets[i];
              const double grad[1] = {2.0 * err};
              net.backward(trace, grad);
              return err * err;
            });
      }
      loss = total_loss / config_.ensemble_size;
      break;
    }
    case CriticKind::kQuantile:
      loss = update_net(quantile_->net(), critic_adam_[0], [&](std::size_t i) {
        return quantile_->accumulate_loss(buf.state(i), buf.targets[i]);
      });
      break;
    case CriticKind::kFlow:
      break;
  }
  return loss;
}

IterationMetrics Trainer::run_iteration() {
  IterationMetrics metrics;
  metrics.iteration = iteration_;

  try {
    RolloutBuffer buf =
        collect_rollouts(venv_, policy_, config_.rollout_len, action_rngs_);
    env_steps_ +=
        static_cast<std::int64_t>(config_.num_envs) * config_.rollout_len;

    if (config_.critic_kind == CriticKind::kFlow)
      target_pass_flow(buf);
    else
      target_pass_baseline(buf);

    const std::size_t total = buf.size();

    // Advantages from the truncated (or point) baseline.
    buf.advantages_raw.resize(total);
    for (int k = 0; k < buf.num_envs; ++k) {
      const std::size_t row = buf.flat(k, 0);
      const int T = buf.rollout_len;
      const auto adv = gae_advantages(
          std::span<const double>(buf.rewards.data() + row, T),
          std::span<const double>(buf.values.data() + row, T),
          std::span<const double>(buf.next_values.data() + row, T),
          std::span<const std::uint8_t>(buf.done.data() + row, T),
          std::span<const std::uint8_t>(buf.truncated.data() + row, T),
          config_.gamma, config_.lambda);
      std::copy(adv.begin(), adv.end(), buf.advantages_raw.begin() + row);
    }

    // Baseline critics regress on the empirical return target.
    if (config_.critic_kind != CriticKind::kFlow) {
      buf.targets.resize(total);
      for (std::size_t i = 0; i < total; ++i)
        buf.targets[i] =
            empirical_return_target(buf.advantages_raw[i], buf.values[i]);
    }

    buf.advantages = buf.advantages_raw;
    if (config_.advantage_normalization) normalize_in_place(buf.advantages);

    // CoV weights over the whole buffer, mass preserved at N*T.
    if (config_.critic_kind == CriticKind::kFlow &&
        config_.cov_temperature > 0.0) {
      std::vector<double> raw(total);
      for (std::size_t i = 0; i < total; ++i)
        raw[i] = flow::cov_weight(buf.kappa[i], config_.cov_temperature);
      buf.weights = flow::normalize_weights(raw);
    } else {
      buf.weights.assign(total, 1.0);
    }

    for (std::size_t i = 0; i < total; ++i) {
      metrics.kappa_mean += buf.kappa[i];
      metrics.weight_mean += buf.weights[i];
    }
    metrics.kappa_mean /= static_cast<double>(total);
    metrics.weight_mean /= static_cast<double>(total);

    if (config_.critic_kind == CriticKind::kFlow) flow_->snapshot_target();

    std::vector<int> indices(total);
    std::iota(indices.begin(), indices.end(), 0);
    const auto bounds =
        chunk_bounds(static_cast<int>(total), config_.minibatches);

    int updates = 0;
    for (int epoch = 0; epoch < config_.epochs; ++epoch) {
      for (std::size_t i = total - 1; i > 0; --i) {
        const std::size_t j = shuffle_rng_.below(i + 1);
        std::swap(indices[i], indices[j]);
      }
      for (int c = 0; c < config_.minibatches; ++c) {
        const std::span<const int> chunk(indices.data() + bounds[c],
                                         static_cast<std::size_t>(bounds[c + 1] - bounds[c]));
        metrics.critic_loss += critic_minibatch_update(buf, chunk, epoch, metrics);

        metrics.policy_objective += weighted_ppo_objective(
            policy_, buf, chunk, config_.ppo_clip, config_.entropy_coef);
        metrics.policy_grad_norm += policy_.clip_grad(config_.grad_norm);
        if (!policy_.adam_update(policy_mean_adam_, policy_log_std_adam_))
          metrics.numeric_aborts += 1;
        updates += 1;
      }
    }
    const double inv_updates = 1.0 / static_cast<double>(updates);
    metrics.critic_loss *= inv_updates;
    metrics.policy_objective *= inv_updates;
    metrics.policy_grad_norm *= inv_updates;
    metrics.critic_grad_norm *=
        inv_updates / (config_.critic_kind == CriticKind::kAvgEnsemble ||
                               config_.critic_kind == CriticKind::kMinEnsemble
                           ? config_.ensemble_size
                           : 1);

    if (!buf.completed_returns.empty()) {
      double sum = 0.0;
      for (double r : buf.completed_returns) sum += r;
      last_ep_return_ = sum / static_cast<double>(buf.completed_returns.size());
    }
    metrics.ep_return_mean = last_ep_return_;
  } catch (const NumericError&) {
    metrics.aborted = true;
  }

  metrics.env_steps = env_steps_;
  iteration_ += 1;
  return metrics;
}

void Trainer::save_checkpoints(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nn::save_checkpoint((fs::path(dir) / "policy.fckp").string(),
                      policy_.mean_net());
  nn::save_raw_vector((fs::path(dir) / "policy_logstd.fckp").string(),
                      policy_.log_std());
  switch (config_.critic_kind) {
    case CriticKind::kFlow:
      nn::save_checkpoint((fs::path(dir) / "critic_flow.fckp").string(),
                          flow_->velocity_net());
      break;
    case CriticKind::kPoint:
      nn::save_checkpoint((fs::path(dir) / "critic.fckp").string(),
                          point_->net());
      break;
    case CriticKind::kAvgEnsemble:
    case CriticKind::kMinEnsemble:
      for (int j = 0; j < config_.ensemble_size; ++j)
        nn::save_checkpoint(
            (fs::path(dir) / ("critic_" + std::to_string(j) + ".fckp")).string(),
            ensemble_->members()[j]);
      break;
    case CriticKind::kQuantile:
      nn::save_checkpoint((fs::path(dir) / "critic_quantile.fckp").string(),
                          quantile_->net());
      break;
  }
}

}  // namespace flowcritic::rl
