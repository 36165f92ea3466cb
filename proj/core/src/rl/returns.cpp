#include "flowcritic/rl/returns.hpp"

#include <cmath>
#include <stdexcept>

namespace flowcritic::rl {

double dist_td_sample(double reward, double gamma, double z_next, double z_cur) {
  return reward + gamma * z_next - z_cur;
}

void lambda_scan(std::span<const double> deltas,
                 std::span<const std::uint8_t> boundary, double gamma_lambda,
                 std::span<double> out) {
  if (deltas.size() != boundary.size() || deltas.size() != out.size())
    throw std::invalid_argument("lambda_scan: size mismatch");
  double acc = 0.0;
  for (std::size_t i = deltas.size(); i-- > 0;) {
    if (boundary[i]) acc = 0.0;
    acc = deltas[i] + gamma_lambda * acc;
    out[i] = acc;
  }
}

std::vector<double> dist_return_target(std::span<const double> td_samples,
                                       std::span<const std::uint8_t> boundary,
                                       double gamma_lambda,
                                       std::span<const double> z_cur) {
  if (td_samples.size() != z_cur.size())
    throw std::invalid_argument("dist_return_target: size mismatch");
  std::vector<double> out(td_samples.size());
  lambda_scan(td_samples, boundary, gamma_lambda, out);
  for (std::size_t t = 0; t < out.size(); ++t) out[t] += z_cur[t];
  return out;
}

std::vector<double> gae_advantages(std::span<const double> rewards,
                                   std::span<const double> values,
                                   std::span<const double> next_values,
                                   std::span<const std::uint8_t> done,
                                   std::span<const std::uint8_t> truncated,
                                   double gamma, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || next_values.size() != n || done.size() != n ||
      truncated.size() != n)
    throw std::invalid_argument("gae_advantages: size mismatch");

  std::vector<double> deltas(n);
  std::vector<std::uint8_t> boundary(n);
  for (std::size_t t = 0; t < n; ++t) {
    deltas[t] = rewards[t] + gamma * next_values[t] - values[t];
    boundary[t] = (done[t] || truncated[t]) ? 1 : 0;
  }
  std::vector<double> adv(n);
  lambda_scan(deltas, boundary, gamma * lambda, adv);
  return adv;
}

double empirical_return_target(double advantage, double value) {
  return advantage + value;
}

void normalize_in_place(std::span<double> values) {
  if (values.empty()) return;
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) {
    const double d = v - mean;
    var += d * d;
  }
  const double std = std::sqrt(var / n);
  for (double& v : values) v = (v - mean) / (std + 1e-8);
}

}  // namespace flowcritic::rl
