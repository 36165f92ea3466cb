#pragma once

#include "flowcritic/envs/env.hpp"

namespace flowcritic::envs {

// Double-integrator in the plane: accelerate a point toward a goal.
// Observation (p - g, v); action is acceleration in [-1,1]^2; reward
// -|p - g|^2 - 0.01|a|^2; episodes truncate at the horizon.
class PointMassEnv final : public Env {
 public:
  static constexpr double kDt = 0.05;
  static constexpr int kHorizon = 100;

  int obs_dim() const override { return 4; }
  int action_dim() const override { return 2; }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(std::span<const double> action, Rng& rng) override;

 private:
  std::vector<double> observation() const;

  double px_ = 0.0, py_ = 0.0;
  double vx_ = 0.0, vy_ = 0.0;
  double gx_ = 0.0, gy_ = 0.0;
  int steps_ = 0;
};

}  // namespace flowcritic::envs
