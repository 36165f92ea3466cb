#include "flowcritic/analysis/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace flowcritic::analysis {

double empirical_w1(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("empirical_w1: sample sets must match in size");
  if (x.empty()) throw std::invalid_argument("empirical_w1: empty sample sets");

  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());

  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) sum += std::abs(xs[i] - ys[i]);
  return sum / static_cast<double>(xs.size());
}

}  // namespace flowcritic::analysis
