#pragma once

#include <span>
#include <vector>

#include "flowcritic/common/rng.hpp"
#include "flowcritic/nn/mlp.hpp"

namespace flowcritic::rl {

enum class EnsembleMode { kAverage, kMinimum };

// Aggregate value over independently trained members.
double ensemble_value(std::span<const nn::Mlp> members,
                      std::span<const double> obs, EnsembleMode mode);

// Quantile midpoints (2i - 1) / (2n) for i = 1..n.
std::vector<double> quantile_midpoints(int n);

// Scalar regression critic trained with squared error.
class PointCritic {
 public:
  PointCritic(int obs_dim, const std::vector<int>& hidden);
  void init(Rng& rng);

  double value(std::span<const double> obs) const;
  // Accumulates d/dtheta of (value - target)^2 and returns the loss.
  double accumulate_loss(std::span<const double> obs, double target);

  nn::Mlp& net() { return net_; }
  const nn::Mlp& net() const { return net_; }

 private:
  nn::Mlp net_;
};

// Five (by default) independently initialized point critics with an
// average or minimum aggregate.
class EnsembleCritic {
 public:
  EnsembleCritic(int obs_dim, const std::vector<int>& hidden, int members,
                 EnsembleMode mode);
  void init(Rng& rng);

  double value(std::span<const double> obs) const;
  double accumulate_loss(std::span<const double> obs, double target);

  std::vector<nn::Mlp>& members() { return members_; }
  const std::vector<nn::Mlp>& members() const { return members_; }
  EnsembleMode mode() const { return mode_; }

 private:
  std::vector<nn::Mlp> members_;
  EnsembleMode mode_;
};

// Distributional baseline: a fixed set of quantiles fit by the
// quantile-Huber loss; the value estimate is the quantile mean.
class QuantileCritic {
 public:
  QuantileCritic(int obs_dim, const std::vector<int>& hidden, int n_quantiles,
                 double huber_kappa);
  void init(Rng& rng);

  double value(std::span<const double> obs) const;
  std::vector<double> quantiles(std::span<const double> obs) const;
  double accumulate_loss(std::span<const double> obs, double target);

  nn::Mlp& net() { return net_; }
  const nn::Mlp& net() const { return net_; }
  int num_quantiles() const { return n_quantiles_; }
  double huber_kappa() const { return huber_kappa_; }

 private:
  nn::Mlp net_;
  int n_quantiles_;
  double huber_kappa_;
  std::vector<double> midpoints_;
};

// Quantile-Huber loss of one (state, target) pair; pure, no gradients.
double quantile_regression_loss(const QuantileCritic& critic,
                                std::span<const double> obs, double target);

}  // namespace flowcritic::rl
