#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flowcritic/nn/mlp.hpp"

namespace flowcritic::nn {

struct AdamState {
  explicit AdamState(std::size_t n, double lr = 5e-4, double b1 = 0.9,
                     double b2 = 0.999, double eps = 1e-8);

  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::int64_t step_count = 0;
  double learning_rate;
  double beta1;
  double beta2;
  double eps_adam;
};

// One bias-corrected Adam update. Gradients are zeroed after a successful
// step. A non-finite gradient rejects the whole update (parameters and
// moments untouched, gradients still cleared) and returns false.
bool adam_step(std::span<double> params, std::span<double> grads,
               AdamState& state);

// Convenience wrapper for a network's own parameter/gradient pair.
bool adam_step(Mlp& net, AdamState& state);

// Scales gradients so that the global L2 norm does not exceed max_norm.
// Returns the pre-clip norm. The two-span overload treats both spans as one
// parameter group (joint norm).
double clip_global_norm(std::span<double> grads, double max_norm);
double clip_global_norm(std::span<double> g0, std::span<double> g1,
                        double max_norm);

}  // namespace flowcritic::nn
