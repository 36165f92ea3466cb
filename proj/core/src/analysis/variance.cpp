#include "flowcritic/analysis/variance.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace flowcritic::analysis {

double phi_derivative_at_zero(std::span<const double> kappa) {
  const std::size_t n = kappa.size();
  if (n < 2)
    throw std::invalid_argument("phi_derivative_at_zero: need at least 2 entries");
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (double k : kappa) {
    if (k < 0.0)
      throw std::invalid_argument("phi_derivative_at_zero: kappa must be >= 0");
    s1 += k;
    s2 += k * k;
    s3 += k * k * k;
  }
  const double nd = static_cast<double>(n);
  return (2.0 / (nd * nd * nd)) * (s2 * s1 - nd * s3);
}

VarianceCheck gradient_variance_check(std::span<const double> kappa,
                                      double alpha, int trials, Rng& rng) {
  const std::size_t n = kappa.size();
  if (n < 2)
    throw std::invalid_argument("gradient_variance_check: need at least 2 entries");
  if (trials < 2)
    throw std::invalid_argument("gradient_variance_check: need at least 2 trials");

  VarianceCheck out;
  out.trials = trials;

  const double nd = static_cast<double>(n);
  std::vector<double> w(n);
  double w_sum = 0.0, k2_sum = 0.0, wk2_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp(-alpha * kappa[i]);
    w_sum += w[i];
    k2_sum += kappa[i] * kappa[i];
    wk2_sum += w[i] * w[i] * kappa[i] * kappa[i];
  }
  out.closed_unweighted = k2_sum / (nd * nd);
  out.closed_weighted = wk2_sum / (w_sum * w_sum);

  // Both estimators are zero-mean, so accumulate raw second moments.
  double sq_u = 0.0, sq_w = 0.0;
  for (int t = 0; t < trials; ++t) {
    double sum_u = 0.0, sum_w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = kappa[i] * rng.gaussian();
      sum_u += g;
      sum_w += w[i] * g;
    }
    const double est_u = sum_u / nd;
    const double est_w = sum_w / w_sum;
    sq_u += est_u * est_u;
    sq_w += est_w * est_w;
  }
  const double td = static_cast<double>(trials);
  out.mc_unweighted = sq_u / td;
  out.mc_weighted = sq_w / td;

  // Variance of a mean of squared Gaussians: Var[s^2] = 2 sigma^4 / T.
  out.se_unweighted = out.closed_unweighted * std::sqrt(2.0 / td);
  out.se_weighted = out.closed_weighted * std::sqrt(2.0 / td);
  return out;
}

}  // namespace flowcritic::analysis
