#include "flowcritic/envs/point_mass.hpp"

#include <algorithm>
#include <stdexcept>

namespace flowcritic::envs {

std::vector<double> PointMassEnv::observation() const {
  return {px_ - gx_, py_ - gy_, vx_, vy_};
}

std::vector<double> PointMassEnv::reset(Rng& rng) {
  px_ = rng.uniform(-1.0, 1.0);
  py_ = rng.uniform(-1.0, 1.0);
  vx_ = 0.0;
  vy_ = 0.0;
  steps_ = 0;
  return observation();
}

StepResult PointMassEnv::step(std::span<const double> action, Rng& rng) {
  (void)rng;  // deterministic dynamics
  if (action.size() != 2)
    throw std::invalid_argument("PointMassEnv: action must have 2 components");
  const double ax = std::clamp(action[0], -1.0, 1.0);
  const double ay = std::clamp(action[1], -1.0, 1.0);

  vx_ += ax * kDt;
  vy_ += ay * kDt;
  px_ += vx_ * kDt;
  py_ += vy_ * kDt;
  steps_ += 1;

  const double dx = px_ - gx_, dy = py_ - gy_;
  StepResult result;
  result.reward = -(dx * dx + dy * dy) - 0.01 * (ax * ax + ay * ay);
  result.truncated = steps_ >= kHorizon;
  result.obs = observation();
  return result;
}

}  // namespace flowcritic::envs
