#pragma once

#include "flowcritic/envs/env.hpp"

namespace flowcritic::envs {

// Torque-limited pendulum swing-up with the usual rigid-body dynamics.
// Observation (cos th, sin th, th_dot); action is torque in [-2,2]; reward
// penalizes angle from upright, angular velocity and torque.
class PendulumEnv final : public Env {
 public:
  static constexpr double kDt = 0.05;
  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;
  static constexpr double kMaxSpeed = 8.0;
  static constexpr double kMaxTorque = 2.0;
  static constexpr int kHorizon = 200;

  int obs_dim() const override { return 3; }
  int action_dim() const override { return 1; }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(std::span<const double> action, Rng& rng) override;

 private:
  std::vector<double> observation() const;

  double theta_ = 0.0;
  double theta_dot_ = 0.0;
  int steps_ = 0;
};

}  // namespace flowcritic::envs
