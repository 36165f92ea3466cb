#pragma once

#include <span>

namespace flowcritic::analysis {

// Empirical 1-Wasserstein distance between two equal-size sample sets:
// sort both ascending and average the absolute differences of the paired
// order statistics (the optimal coupling in one dimension).
double empirical_w1(std::span<const double> x, std::span<const double> y);

}  // namespace flowcritic::analysis
