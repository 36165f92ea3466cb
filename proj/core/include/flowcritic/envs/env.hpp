#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "flowcritic/common/rng.hpp"

namespace flowcritic::envs {

struct StepResult {
  std::vector<double> obs;
  double reward = 0.0;
  bool done = false;       // true terminal: bootstrap with zero
  bool truncated = false;  // time limit: bootstrap with the value estimate
};

// Single environment instance. Instances hold no RNG of their own; the
// caller passes a per-instance stream so trajectories depend only on
// (stream, actions) and never on stepping order.
class Env {
 public:
  virtual ~Env() = default;
  virtual int obs_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual std::vector<double> reset(Rng& rng) = 0;
  virtual StepResult step(std::span<const double> action, Rng& rng) = 0;
};

// Known names: "toy_single_step", "pointmass", "pendulum".
std::unique_ptr<Env> make_env(const std::string& name);

}  // namespace flowcritic::envs
