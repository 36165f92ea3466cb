#include "flowcritic/envs/single_step.hpp"

#include <cmath>

namespace flowcritic::envs {

namespace {
constexpr double kBumpX = 0.8, kBumpY = 0.8;
constexpr double kLengthScale = 0.5;
constexpr double kMixtureWeight = 0.2;  // probability of the wide component
constexpr double kSigmaNarrow = 0.05;
constexpr double kSigmaWide = 10.0;
constexpr double kSigmaOutside = 0.01;
constexpr double kNoisyRadius = 1.0;
}  // namespace

double toy_true_value(double x, double y) {
  const double dx1 = x - kBumpX, dy1 = y - kBumpY;
  const double dx2 = x + kBumpX, dy2 = y + kBumpY;
  const double denom = 2.0 * kLengthScale * kLengthScale;
  return 1.5 * std::exp(-(dx1 * dx1 + dy1 * dy1) / denom) -
         1.5 * std::exp(-(dx2 * dx2 + dy2 * dy2) / denom);
}

double toy_reward(double x, double y, Rng& rng) {
  const double mean = toy_true_value(x, y);
  if (std::sqrt(x * x + y * y) <= kNoisyRadius) {
    const double sigma =
        rng.uniform01() < kMixtureWeight ? kSigmaWide : kSigmaNarrow;
    return mean + sigma * rng.gaussian();
  }
  return mean + kSigmaOutside * rng.gaussian();
}

std::pair<double, double> toy_sample_state(Rng& rng, ToyRegion region) {
  const double half = region == ToyRegion::kTrain ? 2.0 : 3.0;
  return {rng.uniform(-half, half), rng.uniform(-half, half)};
}

SingleStepEnv::SingleStepEnv(ToyRegion region) : region_(region) {}

std::vector<double> SingleStepEnv::reset(Rng& rng) {
  auto [x, y] = toy_sample_state(rng, region_);
  x_ = x;
  y_ = y;
  return {x_, y_};
}

StepResult SingleStepEnv::step(std::span<const double> action, Rng& rng) {
  (void)action;  // single dummy action; reward depends only on the state
  StepResult result;
  result.reward = toy_reward(x_, y_, rng);
  result.done = true;
  result.obs = {x_, y_};
  return result;
}

}  // namespace flowcritic::envs
