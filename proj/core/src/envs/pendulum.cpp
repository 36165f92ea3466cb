#include "flowcritic/envs/pendulum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flowcritic::envs {

namespace {
double wrap_angle(double theta) {
  const double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(theta + std::numbers::pi, two_pi);
  if (wrapped < 0.0) wrapped += two_pi;
  return wrapped - std::numbers::pi;
}
}  // namespace

std::vector<double> PendulumEnv::observation() const {
  return {std::cos(theta_), std::sin(theta_), theta_dot_};
}

std::vector<double> PendulumEnv::reset(Rng& rng) {
  theta_ = rng.uniform(-std::numbers::pi, std::numbers::pi);
  theta_dot_ = rng.uniform(-1.0, 1.0);
  steps_ = 0;
  return observation();
}

StepResult PendulumEnv::step(std::span<const double> action, Rng& rng) {
  (void)rng;
  if (action.size() != 1)
    throw std::invalid_argument("PendulumEnv: action must have 1 component");
  const double torque = std::clamp(action[0], -kMaxTorque, kMaxTorque);

  const double angle = wrap_angle(theta_);
  const double cost = angle * angle + 0.1 * theta_dot_ * theta_dot_ +
                      0.001 * torque * torque;

  theta_dot_ += (3.0 * kGravity / (2.0 * kLength) * std::sin(theta_) +
                 3.0 / (kMass * kLength * kLength) * torque) *
                kDt;
  theta_dot_ = std::clamp(theta_dot_, -kMaxSpeed, kMaxSpeed);
  theta_ += theta_dot_ * kDt;
  steps_ += 1;

  StepResult result;
  result.reward = -cost;
  result.truncated = steps_ >= kHorizon;
  result.obs = observation();
  return result;
}

}  // namespace flowcritic::envs
