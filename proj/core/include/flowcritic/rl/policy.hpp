#pragma once

#include <span>
#include <vector>

#include "flowcritic/common/rng.hpp"
#include "flowcritic/nn/adam.hpp"
#include "flowcritic/nn/mlp.hpp"

namespace flowcritic::rl {

// Diagonal Gaussian policy: the mean comes from a tanh MLP with a linear
// head, the log standard deviation is a state-independent learnable vector
// initialized to zero.
class GaussianPolicy {
 public:
  GaussianPolicy(int obs_dim, int action_dim, const std::vector<int>& hidden);

  void init(Rng& rng);

  // Draws a = mean + exp(log_std) * z and returns the log density.
  std::vector<double> sample_action(std::span<const double> obs, Rng& rng,
                                    double* log_prob_out) const;

  double log_prob(std::span<const double> obs,
                  std::span<const double> action) const;

  // Forward pass that keeps the trace for a later gradient accumulation.
  double log_prob_traced(std::span<const double> obs,
                         std::span<const double> action,
                         nn::ForwardTrace& trace) const;

  // Accumulates coeff * d(log pi)/d(params) into the gradient buffers.
  // `trace` and `mean` must come from log_prob_traced on the same (obs,
  // action) pair.
  void accumulate_log_prob_grad(const nn::ForwardTrace& trace,
                                std::span<const double> action, double coeff);

  // Entropy of the action distribution (state-independent for a diagonal
  // Gaussian with fixed log_std).
  double entropy() const;
  void accumulate_entropy_grad(double coeff);

  void zero_grad();
  void scale_grad(double factor);
  // Joint global-norm clip over mean-net and log_std gradients.
  double clip_grad(double max_norm);
  bool adam_update(nn::AdamState& mean_state, nn::AdamState& log_std_state);

  int obs_dim() const { return mean_net_.input_dim(); }
  int action_dim() const { return action_dim_; }
  nn::Mlp& mean_net() { return mean_net_; }
  const nn::Mlp& mean_net() const { return mean_net_; }
  std::vector<double>& log_std() { return log_std_; }
  const std::vector<double>& log_std() const { return log_std_; }
  const std::vector<double>& log_std_grad() const { return log_std_grad_; }

 private:
  int action_dim_;
  nn::Mlp mean_net_;
  std::vector<double> log_std_;
  std::vector<double> log_std_grad_;
};

}  // namespace flowcritic::rl
