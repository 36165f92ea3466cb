#include "flowcritic/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace flowcritic::nn {

AdamState::AdamState(std::size_t n, double lr, double b1, double b2, double eps)
    : first_moment(n, 0.0),
      second_moment(n, 0.0),
      learning_rate(lr),
      beta1(b1),
      beta2(b2),
      eps_adam(eps) {
  if (lr <= 0.0) throw std::invalid_argument("AdamState: learning rate must be positive");
}

bool adam_step(std::span<double> params, std::span<double> grads,
               AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size())
    throw std::invalid_argument("adam_step: size mismatch");

  for (double g : grads) {
    if (!std::isfinite(g)) {
      for (double& gg : grads) gg = 0.0;
      return false;
    }
  }

  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g * g;
    const double m_hat = m / bc1;
    const double v_hat = v / bc2;
    params[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.eps_adam);
    grads[i] = 0.0;
  }
  return true;
}

bool adam_step(Mlp& net, AdamState& state) {
  return adam_step(net.params(), net.grads(), state);
}

namespace {

double squared_norm(std::span<const double> g) {
  double s = 0.0;
  for (double x : g) s += x * x;
  return s;
}

void scale(std::span<double> g, double f) {
  for (double& x : g) x *= f;
}

}  // namespace

double clip_global_norm(std::span<double> grads, double max_norm) {
  if (max_norm <= 0.0)
    throw std::invalid_argument("clip_global_norm: max_norm must be positive");
  const double norm = std::sqrt(squared_norm(grads));
  if (norm > max_norm) scale(grads, max_norm / norm);
  return norm;
}

double clip_global_norm(std::span<double> g0, std::span<double> g1,
                        double max_norm) {
  if (max_norm <= 0.0)
    throw std::invalid_argument("clip_global_norm: max_norm must be positive");
  const double norm = std::sqrt(squared_norm(g0) + squared_norm(g1));
  if (norm > max_norm) {
    const double f = max_norm / norm;
    scale(g0, f);
    scale(g1, f);
  }
  return norm;
}

}  // namespace flowcritic::nn
