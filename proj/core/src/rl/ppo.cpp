#include "flowcritic/rl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "flowcritic/common/errors.hpp"

namespace flowcritic::rl {

double ppo_surrogate(double ratio, double advantage, double clip) {
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
  return std::min(ratio * advantage, clipped * advantage);
}

double weighted_ppo_objective(GaussianPolicy& policy, const RolloutBuffer& buf,
                              std::span<const int> indices, double clip,
                              double entropy_coef) {
  if (indices.empty())
    throw std::invalid_argument("weighted_ppo_objective: empty minibatch");

  policy.zero_grad();
  nn::ForwardTrace trace;
  double objective_sum = 0.0;
  const double inv_batch = 1.0 / static_cast<double>(indices.size());

  for (int idx : indices) {
    const std::size_t i = static_cast<std::size_t>(idx);
    const auto obs = buf.state(i);
    const auto action = buf.action(i);
    const double logp_new = policy.log_prob_traced(obs, action, trace);
    const double ratio = std::exp(logp_new - buf.log_probs[i]);
    if (!std::isfinite(ratio))
      throw NumericError("weighted_ppo_objective: non-finite ratio at sample " +
                         std::to_string(idx));

    const double adv = buf.advantages[i];
    const double w = buf.weights[i];
    const double surr_unclipped = ratio * adv;
    const double surr_clipped =
        std::clamp(ratio, 1.0 - clip, 1.0 + clip) * adv;
    objective_sum += w * std::min(surr_unclipped, surr_clipped);

    // min() selects the unclipped branch when it is the smaller one; only
    // that branch depends on theta, and d ratio / d theta = ratio * dlogp.
    if (surr_unclipped <= surr_clipped) {
      const double coeff = -w * adv * ratio * inv_batch;  // negated objective
      policy.accumulate_log_prob_grad(trace, action, coeff);
    }
  }

  double objective = objective_sum * inv_batch;
  if (entropy_coef != 0.0) {
    objective += entropy_coef * policy.entropy();
    policy.accumulate_entropy_grad(-entropy_coef);
  }
  return objective;
}

}  // namespace flowcritic::rl
