#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "flowcritic/envs/env.hpp"

namespace flowcritic::envs {

// N independent instances stepped in lockstep. Instance i draws from its
// own stream derived from (seed, i), so per-instance trajectories are
// independent of stepping order. Done or truncated instances auto-reset;
// the pre-reset successor observation stays available for bootstrapping.
class VecEnv {
 public:
  VecEnv(const std::string& name, int num_envs, std::uint64_t seed);

  void reset_all();
  void step(std::span<const double> actions);  // num_envs * action_dim

  int num_envs() const { return num_envs_; }
  int obs_dim() const { return obs_dim_; }
  int action_dim() const { return action_dim_; }

  // Current observations (post-reset where an episode just ended).
  std::span<const double> observations() const { return obs_; }
  // Results of the last step.
  std::span<const double> rewards() const { return rewards_; }
  std::span<const std::uint8_t> dones() const { return done_; }
  std::span<const std::uint8_t> truncations() const { return truncated_; }
  // Raw successor observations from the last step, before any auto-reset.
  std::span<const double> boot_observations() const { return boot_obs_; }

  // Episode returns completed since the last drain, in completion order.
  std::vector<double> drain_completed_returns();

 private:
  int num_envs_;
  int obs_dim_;
  int action_dim_;
  std::vector<std::unique_ptr<Env>> envs_;
  std::vector<Rng> rngs_;
  std::vector<double> obs_;
  std::vector<double> boot_obs_;
  std::vector<double> rewards_;
  std::vector<std::uint8_t> done_;
  std::vector<std::uint8_t> truncated_;
  std::vector<double> episode_return_;
  std::vector<double> completed_returns_;
};

}  // namespace flowcritic::envs
