#include "flowcritic/rl/critics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flowcritic::rl {

namespace {

std::vector<int> critic_layers(int obs_dim, const std::vector<int>& hidden,
                               int out) {
  std::vector<int> sizes;
  sizes.push_back(obs_dim);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

struct HuberParts {
  double loss;
  double dloss_du;  // derivative w.r.t. u = target - quantile
};

HuberParts quantile_huber(double u, double tau, double kappa) {
  const double weight = std::abs(tau - (u < 0.0 ? 1.0 : 0.0));
  double huber, dhuber;
  if (std::abs(u) <= kappa) {
    huber = 0.5 * u * u;
    dhuber = u;
  } else {
    huber = kappa * (std::abs(u) - 0.5 * kappa);
    dhuber = kappa * (u > 0.0 ? 1.0 : -1.0);
  }
  return {weight * huber / kappa, weight * dhuber / kappa};
}

}  // namespace

double ensemble_value(std::span<const nn::Mlp> members,
                      std::span<const double> obs, EnsembleMode mode) {
  if (members.empty())
    throw std::invalid_argument("ensemble_value: no members");
  if (mode == EnsembleMode::kAverage) {
    double sum = 0.0;
    for (const nn::Mlp& m : members) sum += m.forward(obs)[0];
    return sum / static_cast<double>(members.size());
  }
  double best = members.front().forward(obs)[0];
  for (std::size_t i = 1; i < members.size(); ++i)
    best = std::min(best, members[i].forward(obs)[0]);
  return best;
}

std::vector<double> quantile_midpoints(int n) {
  if (n <= 0) throw std::invalid_argument("quantile_midpoints: n must be > 0");
  std::vector<double> taus(n);
  for (int i = 1; i <= n; ++i)
    taus[i - 1] = (2.0 * i - 1.0) / (2.0 * n);
  return taus;
}

PointCritic::PointCritic(int obs_dim, const std::vector<int>& hidden)
    : net_(critic_layers(obs_dim, hidden, 1), nn::Activation::kRelu) {}

void PointCritic::init(Rng& rng) { net_.init_uniform(rng); }

double PointCritic::value(std::span<const double> obs) const {
  return net_.forward(obs)[0];
}

double PointCritic::accumulate_loss(std::span<const double> obs,
                                    double target) {
  nn::ForwardTrace trace;
  const double v = net_.forward(obs, trace)[0];
  const double err = v - target;
  const double grad[1] = {2.0 * err};
  net_.backward(trace, grad);
  return err * err;
}

EnsembleCritic::EnsembleCritic(int obs_dim, const std::vector<int>& hidden,
                               int members, EnsembleMode mode)
    : mode_(mode) {
  if (members <= 0)
    throw std::invalid_argument("EnsembleCritic: need at least one member");
  members_.reserve(members);
  for (int i = 0; i < members; ++i)
    members_.emplace_back(critic_layers(obs_dim, hidden, 1),
                          nn::Activation::kRelu);
}

void EnsembleCritic::init(Rng& rng) {
  for (nn::Mlp& m : members_) m.init_uniform(rng);
}

double EnsembleCritic::value(std::span<const double> obs) const {
  return ensemble_value(members_, obs, mode_);
}

double EnsembleCritic::accumulate_loss(std::span<const double> obs,
                                       double target) {
  // Each member regresses on the shared target with its own squared error.
  nn::ForwardTrace trace;
  double total = 0.0;
  for (nn::Mlp& m : members_) {
    const double v = m.forward(obs, trace)[0];
    const double err = v - target;
    const double grad[1] = {2.0 * err};
    m.backward(trace, grad);
    total += err * err;
  }
  return total / static_cast<double>(members_.size());
}

QuantileCritic::QuantileCritic(int obs_dim, const std::vector<int>& hidden,
                               int n_quantiles, double huber_kappa)
    : net_(critic_layers(obs_dim, hidden, n_quantiles), nn::Activation::kRelu),
      n_quantiles_(n_quantiles),
      huber_kappa_(huber_kappa),
      midpoints_(quantile_midpoints(n_quantiles)) {
  if (huber_kappa <= 0.0)
    throw std::invalid_argument("QuantileCritic: kappa must be positive");
}

void QuantileCritic::init(Rng& rng) { net_.init_uniform(rng); }

std::vector<double> QuantileCritic::quantiles(std::span<const double> obs) const {
  return net_.forward(obs);
}

double QuantileCritic::value(std::span<const double> obs) const {
  const std::vector<double> q = net_.forward(obs);
  double sum = 0.0;
  for (double v : q) sum += v;
  return sum / static_cast<double>(q.size());
}

double QuantileCritic::accumulate_loss(std::span<const double> obs,
                                       double target) {
  nn::ForwardTrace trace;
  const std::vector<double> q = net_.forward(obs, trace);
  std::vector<double> grad(n_quantiles_);
  double loss = 0.0;
  for (int i = 0; i < n_quantiles_; ++i) {
    const double u = target - q[i];
    const HuberParts parts = quantile_huber(u, midpoints_[i], huber_kappa_);
    loss += parts.loss;
    grad[i] = -parts.dloss_du / static_cast<double>(n_quantiles_);
  }
  loss /= static_cast<double>(n_quantiles_);
  net_.backward(trace, grad);
  return loss;
}

double quantile_regression_loss(const QuantileCritic& critic,
                                std::span<const double> obs, double target) {
  const std::vector<double> q = critic.quantiles(obs);
  const std::vector<double> taus = quantile_midpoints(critic.num_quantiles());
  double loss = 0.0;
  for (int i = 0; i < critic.num_quantiles(); ++i) {
    const double u = target - q[i];
    loss += quantile_huber(u, taus[i], critic.huber_kappa()).loss;
  }
  return loss / static_cast<double>(critic.num_quantiles());
}

}  // namespace flowcritic::rl
