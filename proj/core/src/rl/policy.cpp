#include "flowcritic/rl/policy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flowcritic::rl {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;  // log(2*pi)

std::vector<int> mean_layers(int obs_dim, const std::vector<int>& hidden,
                             int action_dim) {
  std::vector<int> sizes;
  sizes.push_back(obs_dim);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(action_dim);
  return sizes;
}

double gaussian_log_density(std::span<const double> action,
                            std::span<const double> mean,
                            std::span<const double> log_std) {
  double logp = 0.0;
  for (std::size_t d = 0; d < action.size(); ++d) {
    const double std = std::exp(log_std[d]);
    const double z = (action[d] - mean[d]) / std;
    logp += -0.5 * z * z - log_std[d] - 0.5 * kLogTwoPi;
  }
  return logp;
}

}  // namespace

GaussianPolicy::GaussianPolicy(int obs_dim, int action_dim,
                               const std::vector<int>& hidden)
    : action_dim_(action_dim),
      mean_net_(mean_layers(obs_dim, hidden, action_dim),
                nn::Activation::kTanh),
      log_std_(action_dim, 0.0),
      log_std_grad_(action_dim, 0.0) {
  if (action_dim <= 0)
    throw std::invalid_argument("GaussianPolicy: action_dim must be positive");
}

void GaussianPolicy::init(Rng& rng) { mean_net_.init_uniform(rng); }

std::vector<double> GaussianPolicy::sample_action(std::span<const double> obs,
                                                  Rng& rng,
                                                  double* log_prob_out) const {
  const std::vector<double> mean = mean_net_.forward(obs);
  std::vector<double> action(action_dim_);
  for (int d = 0; d < action_dim_; ++d)
    action[d] = mean[d] + std::exp(log_std_[d]) * rng.gaussian();
  if (log_prob_out != nullptr)
    *log_prob_out = gaussian_log_density(action, mean, log_std_);
  return action;
}

double GaussianPolicy::log_prob(std::span<const double> obs,
                                std::span<const double> action) const {
  const std::vector<double> mean = mean_net_.forward(obs);
  return gaussian_log_density(action, mean, log_std_);
}

double GaussianPolicy::log_prob_traced(std::span<const double> obs,
                                       std::span<const double> action,
                                       nn::ForwardTrace& trace) const {
  const std::vector<double> mean = mean_net_.forward(obs, trace);
  return gaussian_log_density(action, mean, log_std_);
}

void GaussianPolicy::accumulate_log_prob_grad(const nn::ForwardTrace& trace,
                                              std::span<const double> action,
                                              double coeff) {
  // The mean equals the linear output layer's pre-activation saved in the
  // trace, so no second forward pass is needed.
  const auto& mean = trace.pre_activations.back();
  std::vector<double> mean_grad(action_dim_);
  for (int d = 0; d < action_dim_; ++d) {
    const double std = std::exp(log_std_[d]);
    const double z = (action[d] - mean[d]) / std;
    mean_grad[d] = coeff * z / std;                   // d logp / d mean
    log_std_grad_[d] += coeff * (z * z - 1.0);        // d logp / d log_std
  }
  mean_net_.backward(trace, mean_grad);
}

double GaussianPolicy::entropy() const {
  double h = 0.0;
  for (double ls : log_std_) h += 0.5 * (kLogTwoPi + 1.0) + ls;
  return h;
}

void GaussianPolicy::accumulate_entropy_grad(double coeff) {
  for (double& g : log_std_grad_) g += coeff;
}

void GaussianPolicy::zero_grad() {
  mean_net_.zero_grad();
  log_std_grad_.assign(log_std_grad_.size(), 0.0);
}

void GaussianPolicy::scale_grad(double factor) {
  mean_net_.scale_grad(factor);
  for (double& g : log_std_grad_) g *= factor;
}

double GaussianPolicy::clip_grad(double max_norm) {
  return nn::clip_global_norm(mean_net_.grads(), log_std_grad_, max_norm);
}

bool GaussianPolicy::adam_update(nn::AdamState& mean_state,
                                 nn::AdamState& log_std_state) {
  // Reject the whole update if either part carries a non-finite gradient,
  // so the two parameter groups never drift out of step.
  bool finite = true;
  for (double g : mean_net_.grads())
    if (!std::isfinite(g)) finite = false;
  for (double g : log_std_grad_)
    if (!std::isfinite(g)) finite = false;
  if (!finite) {
    zero_grad();
    return false;
  }
  nn::adam_step(mean_net_, mean_state);
  nn::adam_step(log_std_, log_std_grad_, log_std_state);
  return true;
}

}  // namespace flowcritic::rl
