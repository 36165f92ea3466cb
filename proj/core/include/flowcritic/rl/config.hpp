#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flowcritic::rl {

enum class CriticKind { kFlow, kPoint, kAvgEnsemble, kMinEnsemble, kQuantile };

std::string to_string(CriticKind kind);
CriticKind critic_kind_from_string(const std::string& name);

// Full training configuration. Defaults are the published control-task
// settings; desk-scale runs override num_envs / minibatch sizing and the
// network widths through the same fields.
struct TrainConfig {
  std::string env_name = "pointmass";
  CriticKind critic_kind = CriticKind::kFlow;
  std::uint64_t seed = 0;
  std::int64_t total_steps = 200000;

  double gamma = 0.99;
  double lambda = 0.95;
  double ppo_clip = 0.2;        // epsilon
  double velocity_clip = 0.2;   // delta
  double cov_temperature = 0.1; // alpha

  int n_value_samples = 10;  // n
  int truncation = 1;        // m
  int euler_steps = 5;

  int num_envs = 1024;
  int rollout_len = 16;
  int epochs = 4;
  int minibatches = 2;
  // The epoch split always makes `minibatches` contiguous chunks; 0 derives
  // the size from that split (8192 at the published scale).
  int minibatch_size = 0;

  int effective_minibatch_size() const;

  double learning_rate = 5e-4;
  double grad_norm = 1.0;
  bool advantage_normalization = true;
  double entropy_coef = 0.0;

  int ensemble_size = 5;
  int num_quantiles = 51;
  double huber_kappa = 1.0;

  std::vector<int> actor_hidden{256, 256};
  std::vector<int> critic_hidden{512, 512, 512, 512};

  std::string run_dir;

  void validate() const;  // throws std::invalid_argument on bad settings

  // Strict JSON round-trip: unknown keys are rejected on load.
  std::string to_json_string() const;
  static TrainConfig from_json_string(const std::string& text);
  static TrainConfig from_json_file(const std::string& path);
  void write_json_file(const std::string& path) const;
};

}  // namespace flowcritic::rl
