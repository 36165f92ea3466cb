#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace flowcritic::rl {

// Distributional TD sample: r + gamma * z_next - z_cur. Callers pass
// z_next = 0 at true terminals.
double dist_td_sample(double reward, double gamma, double z_next, double z_cur);

// Backward lambda-scan over one environment row: out[t] = delta[t] +
// gamma*lambda * out[t+1], reset wherever boundary[t] is set (done or
// truncated). Shared by the advantage and the distributional target.
void lambda_scan(std::span<const double> deltas,
                 std::span<const std::uint8_t> boundary, double gamma_lambda,
                 std::span<double> out);

// Distributional return target for one row: z_hat[t] = sum of discounted
// TD samples plus the state's own flow sample.
std::vector<double> dist_return_target(std::span<const double> td_samples,
                                       std::span<const std::uint8_t> boundary,
                                       double gamma_lambda,
                                       std::span<const double> z_cur);

// GAE over one row. next_values must already carry the terminal/truncation
// convention (zero at true terminals, bootstrap value otherwise).
std::vector<double> gae_advantages(std::span<const double> rewards,
                                   std::span<const double> values,
                                   std::span<const double> next_values,
                                   std::span<const std::uint8_t> done,
                                   std::span<const std::uint8_t> truncated,
                                   double gamma, double lambda);

// Regression target for the baseline critics: unnormalized advantage plus
// the value estimate.
double empirical_return_target(double advantage, double value);

// In-place standardization with an epsilon guard; uses population moments.
void normalize_in_place(std::span<double> values);

}  // namespace flowcritic::rl
