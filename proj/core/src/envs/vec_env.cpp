#include "flowcritic/envs/vec_env.hpp"

#include <algorithm>
#include <stdexcept>

#include "flowcritic/envs/pendulum.hpp"
#include "flowcritic/envs/point_mass.hpp"
#include "flowcritic/envs/single_step.hpp"

namespace flowcritic::envs {

std::unique_ptr<Env> make_env(const std::string& name) {
  if (name == "toy_single_step") return std::make_unique<SingleStepEnv>();
  if (name == "pointmass") return std::make_unique<PointMassEnv>();
  if (name == "pendulum") return std::make_unique<PendulumEnv>();
  throw std::invalid_argument("unknown environment: " + name);
}

VecEnv::VecEnv(const std::string& name, int num_envs, std::uint64_t seed)
    : num_envs_(num_envs) {
  if (num_envs <= 0)
    throw std::invalid_argument("VecEnv: num_envs must be positive");
  envs_.reserve(num_envs);
  rngs_.reserve(num_envs);
  for (int i = 0; i < num_envs; ++i) {
    envs_.push_back(make_env(name));
    rngs_.emplace_back(seed, Rng::mix(streams::kEnv, static_cast<std::uint64_t>(i)));
  }
  obs_dim_ = envs_.front()->obs_dim();
  action_dim_ = envs_.front()->action_dim();
  obs_.assign(static_cast<std::size_t>(num_envs) * obs_dim_, 0.0);
  boot_obs_ = obs_;
  rewards_.assign(num_envs, 0.0);
  done_.assign(num_envs, 0);
  truncated_.assign(num_envs, 0);
  episode_return_.assign(num_envs, 0.0);
  reset_all();
}

void VecEnv::reset_all() {
  for (int i = 0; i < num_envs_; ++i) {
    auto obs = envs_[i]->reset(rngs_[i]);
    std::copy(obs.begin(), obs.end(), obs_.begin() + static_cast<std::size_t>(i) * obs_dim_);
    episode_return_[i] = 0.0;
  }
  std::fill(done_.begin(), done_.end(), 0);
  std::fill(truncated_.begin(), truncated_.end(), 0);
}

void VecEnv::step(std::span<const double> actions) {
  if (actions.size() != static_cast<std::size_t>(num_envs_) * action_dim_)
    throw std::invalid_argument("VecEnv::step: action matrix shape mismatch");

  for (int i = 0; i < num_envs_; ++i) {
    auto action = actions.subspan(static_cast<std::size_t>(i) * action_dim_,
                                  action_dim_);
    StepResult r = envs_[i]->step(action, rngs_[i]);
    rewards_[i] = r.reward;
    done_[i] = r.done ? 1 : 0;
    truncated_[i] = r.truncated ? 1 : 0;
    episode_return_[i] += r.reward;

    std::copy(r.obs.begin(), r.obs.end(),
              boot_obs_.begin() + static_cast<std::size_t>(i) * obs_dim_);
    if (r.done || r.truncated) {
      completed_returns_.push_back(episode_return_[i]);
      episode_return_[i] = 0.0;
      auto fresh = envs_[i]->reset(rngs_[i]);
      std::copy(fresh.begin(), fresh.end(),
                obs_.begin() + static_cast<std::size_t>(i) * obs_dim_);
    } else {
      std::copy(r.obs.begin(), r.obs.end(),
                obs_.begin() + static_cast<std::size_t>(i) * obs_dim_);
    }
  }
}

std::vector<double> VecEnv::drain_completed_returns() {
  std::vector<double> out;
  out.swap(completed_returns_);
  return out;
}

}  // namespace flowcritic::envs
