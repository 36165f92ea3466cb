#pragma once

#include <span>

#include "flowcritic/common/rng.hpp"

namespace flowcritic::analysis {

// d/dalpha at alpha=0 of the weighted-minus-unweighted gradient-estimator
// variance gap: (2/N^3) * (sum k_i^2 * sum k_j - N * sum k_i^3). Strictly
// negative whenever the entries are not all equal.
double phi_derivative_at_zero(std::span<const double> kappa);

struct VarianceCheck {
  double closed_unweighted = 0.0;  // (1/N^2) sum kappa_i^2
  double closed_weighted = 0.0;    // sum e^{-2ak} k^2 / (sum e^{-ak})^2
  double mc_unweighted = 0.0;
  double mc_weighted = 0.0;
  double se_unweighted = 0.0;  // standard error of the MC variance estimate
  double se_weighted = 0.0;
  int trials = 0;
};

// Simulates per-sample scalar gradients g_i ~ N(0, kappa_i^2) (unit score
// norms, independent samples), forms the weighted and unweighted estimator
// values per trial, and compares empirical variances with the closed forms.
VarianceCheck gradient_variance_check(std::span<const double> kappa,
                                      double alpha, int trials, Rng& rng);

}  // namespace flowcritic::analysis
