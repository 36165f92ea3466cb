#include "flowcritic/rl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace flowcritic::rl {

using json = nlohmann::ordered_json;

std::string to_string(CriticKind kind) {
  switch (kind) {
    case CriticKind::kFlow: return "flow";
    case CriticKind::kPoint: return "point";
    case CriticKind::kAvgEnsemble: return "avg_ensemble";
    case CriticKind::kMinEnsemble: return "min_ensemble";
    case CriticKind::kQuantile: return "quantile";
  }
  return "flow";
}

CriticKind critic_kind_from_string(const std::string& name) {
  if (name == "flow") return CriticKind::kFlow;
  if (name == "point") return CriticKind::kPoint;
  if (name == "avg_ensemble") return CriticKind::kAvgEnsemble;
  if (name == "min_ensemble") return CriticKind::kMinEnsemble;
  if (name == "quantile") return CriticKind::kQuantile;
  throw std::invalid_argument("unknown critic kind: " + name);
}

void TrainConfig::validate() const {
  if (gamma < 0.0 || gamma >= 1.0)
    throw std::invalid_argument("config: gamma must lie in [0,1)");
  if (lambda < 0.0 || lambda > 1.0)
    throw std::invalid_argument("config: lambda must lie in [0,1]");
  if (ppo_clip <= 0.0) throw std::invalid_argument("config: clip must be > 0");
  if (velocity_clip <= 0.0)
    throw std::invalid_argument("config: delta must be > 0");
  if (cov_temperature < 0.0)
    throw std::invalid_argument("config: alpha must be >= 0");
  if (n_value_samples < 2)
    throw std::invalid_argument("config: n_value_samples must be >= 2");
  if (truncation < 0 || truncation >= n_value_samples)
    throw std::invalid_argument("config: need 0 <= m < n");
  if (euler_steps <= 0)
    throw std::invalid_argument("config: euler_steps must be positive");
  if (num_envs <= 0 || rollout_len <= 0)
    throw std::invalid_argument("config: num_envs and rollout_len must be positive");
  if (epochs <= 0) throw std::invalid_argument("config: epochs must be positive");
  if (minibatches <= 0 ||
      minibatches > num_envs * rollout_len)
    throw std::invalid_argument("config: bad minibatch count");
  if (minibatch_size < 0 ||
      static_cast<std::int64_t>(minibatch_size) >
          static_cast<std::int64_t>(num_envs) * rollout_len)
    throw std::invalid_argument("config: minibatch size exceeds buffer");
  if (learning_rate <= 0.0)
    throw std::invalid_argument("config: learning rate must be positive");
  if (grad_norm <= 0.0)
    throw std::invalid_argument("config: grad norm must be positive");
  if (ensemble_size <= 0 || num_quantiles <= 0 || huber_kappa <= 0.0)
    throw std::invalid_argument("config: bad baseline critic settings");
  if (actor_hidden.empty() || critic_hidden.empty())
    throw std::invalid_argument("config: hidden layer lists cannot be empty");
}

int TrainConfig::effective_minibatch_size() const {
  if (minibatch_size > 0) return minibatch_size;
  const int total = num_envs * rollout_len;
  return (total + minibatches - 1) / minibatches;
}

namespace {

json to_json(const TrainConfig& c) {
  json j;
  j["env"] = c.env_name;
  j["critic"] = to_string(c.critic_kind);
  j["seed"] = c.seed;
  j["steps"] = c.total_steps;
  j["gamma"] = c.gamma;
  j["lambda"] = c.lambda;
  j["clip"] = c.ppo_clip;
  j["delta"] = c.velocity_clip;
  j["alpha"] = c.cov_temperature;
  j["n_samples"] = c.n_value_samples;
  j["m_trunc"] = c.truncation;
  j["euler_steps"] = c.euler_steps;
  j["num_envs"] = c.num_envs;
  j["rollout_len"] = c.rollout_len;
  j["epochs"] = c.epochs;
  j["minibatches"] = c.minibatches;
  j["minibatch_size"] = c.effective_minibatch_size();
  j["lr"] = c.learning_rate;
  j["grad_norm"] = c.grad_norm;
  j["advantage_normalization"] = c.advantage_normalization;
  j["entropy_coef"] = c.entropy_coef;
  j["ensemble_size"] = c.ensemble_size;
  j["num_quantiles"] = c.num_quantiles;
  j["huber_kappa"] = c.huber_kappa;
  j["actor_hidden"] = c.actor_hidden;
  j["critic_hidden"] = c.critic_hidden;
  j["run_dir"] = c.run_dir;
  return j;
}

TrainConfig from_json(const json& j) {
  static const std::set<std::string> known = {
      "env", "critic", "seed", "steps", "gamma", "lambda", "clip", "delta",
      "alpha", "n_samples", "m_trunc", "euler_steps", "num_envs",
      "rollout_len", "epochs", "minibatches", "minibatch_size", "lr",
      "grad_norm", "advantage_normalization", "entropy_coef", "ensemble_size",
      "num_quantiles", "huber_kappa", "actor_hidden", "critic_hidden",
      "run_dir"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key()))
      throw std::invalid_argument("config: unknown key '" + item.key() + "'");
  }

  TrainConfig c;
  if (j.contains("env")) c.env_name = j["env"].get<std::string>();
  if (j.contains("critic"))
    c.critic_kind = critic_kind_from_string(j["critic"].get<std::string>());
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("steps")) c.total_steps = j["steps"].get<std::int64_t>();
  if (j.contains("gamma")) c.gamma = j["gamma"].get<double>();
  if (j.contains("lambda")) c.lambda = j["lambda"].get<double>();
  if (j.contains("clip")) c.ppo_clip = j["clip"].get<double>();
  if (j.contains("delta")) c.velocity_clip = j["delta"].get<double>();
  if (j.contains("alpha")) c.cov_temperature = j["alpha"].get<double>();
  if (j.contains("n_samples")) c.n_value_samples = j["n_samples"].get<int>();
  if (j.contains("m_trunc")) c.truncation = j["m_trunc"].get<int>();
  if (j.contains("euler_steps")) c.euler_steps = j["euler_steps"].get<int>();
  if (j.contains("num_envs")) c.num_envs = j["num_envs"].get<int>();
  if (j.contains("rollout_len")) c.rollout_len = j["rollout_len"].get<int>();
  if (j.contains("epochs")) c.epochs = j["epochs"].get<int>();
  if (j.contains("minibatches")) c.minibatches = j["minibatches"].get<int>();
  if (j.contains("minibatch_size"))
    c.minibatch_size = j["minibatch_size"].get<int>();
  if (j.contains("lr")) c.learning_rate = j["lr"].get<double>();
  if (j.contains("grad_norm")) c.grad_norm = j["grad_norm"].get<double>();
  if (j.contains("advantage_normalization"))
    c.advantage_normalization = j["advantage_normalization"].get<bool>();
  if (j.contains("entropy_coef"))
    c.entropy_coef = j["entropy_coef"].get<double>();
  if (j.contains("ensemble_size"))
    c.ensemble_size = j["ensemble_size"].get<int>();
  if (j.contains("num_quantiles"))
    c.num_quantiles = j["num_quantiles"].get<int>();
  if (j.contains("huber_kappa")) c.huber_kappa = j["huber_kappa"].get<double>();
  if (j.contains("actor_hidden"))
    c.actor_hidden = j["actor_hidden"].get<std::vector<int>>();
  if (j.contains("critic_hidden"))
    c.critic_hidden = j["critic_hidden"].get<std::vector<int>>();
  if (j.contains("run_dir")) c.run_dir = j["run_dir"].get<std::string>();
  return c;
}

}  // namespace

std::string TrainConfig::to_json_string() const {
  return to_json(*this).dump(2) + "\n";
}

TrainConfig TrainConfig::from_json_string(const std::string& text) {
  json j = json::parse(text);
  return from_json(j);
}

TrainConfig TrainConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_string(buffer.str());
}

void TrainConfig::write_json_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("config: cannot write " + path);
  out << to_json_string();
}

}  // namespace flowcritic::rl
