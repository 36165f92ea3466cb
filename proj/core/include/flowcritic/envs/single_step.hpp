#pragma once

#include "flowcritic/envs/env.hpp"

namespace flowcritic::envs {

enum class ToyRegion { kTrain, kFull };  // [-2,2]^2 and [-3,3]^2

// Expected value surface: two opposing Gaussian bumps.
double toy_true_value(double x, double y);

// Observed reward at s: inside the unit disk a two-component Gaussian
// mixture around V*(s) (high-noise branch with probability 0.2), outside a
// tight Gaussian.
double toy_reward(double x, double y, Rng& rng);

std::pair<double, double> toy_sample_state(Rng& rng, ToyRegion region);

// One-step decision process over [-3,3]^2: a single dummy action, reward
// drawn from the state-dependent noise model, episode ends immediately.
class SingleStepEnv final : public Env {
 public:
  explicit SingleStepEnv(ToyRegion region = ToyRegion::kTrain);

  int obs_dim() const override { return 2; }
  int action_dim() const override { return 1; }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(std::span<const double> action, Rng& rng) override;

 private:
  ToyRegion region_;
  double x_ = 0.0;
  double y_ = 0.0;
};

}  // namespace flowcritic::envs
