#pragma once

#include <span>

#include "flowcritic/rl/policy.hpp"
#include "flowcritic/rl/rollout.hpp"

namespace flowcritic::rl {

// Per-sample clipped surrogate value (no weighting, no gradient).
double ppo_surrogate(double ratio, double advantage, double clip);

// Weighted clipped objective over a minibatch of buffer rows. Accumulates
// the gradient of the NEGATED mean objective (so an Adam minimization step
// maximizes it) into the policy and returns the objective value. An
// entropy bonus is added when entropy_coef is nonzero.
//
// Throws NumericError when an importance ratio turns non-finite.
double weighted_ppo_objective(GaussianPolicy& policy, const RolloutBuffer& buf,
                              std::span<const int> indices, double clip,
                              double entropy_coef);

}  // namespace flowcritic::rl
