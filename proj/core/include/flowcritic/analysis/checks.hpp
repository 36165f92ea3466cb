#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flowcritic::analysis {

struct CheckResult {
  std::string name;
  bool pass = false;
  bool inconclusive = false;  // insufficient statistical power, not a failure
  std::string detail;

  bool failed() const { return !pass && !inconclusive; }
};

struct CheckConfig {
  std::uint64_t seed = 1;
  // Metric-property suites.
  int property_sets = 1000;
  double exact_tolerance = 1e-12;
  int particles = 512;
  // Contraction sweep.
  int contraction_cases = 100;
  double contraction_slack = 0.02;
  // Convergence experiments.
  double gamma = 0.5;
  double eps_max = 0.1;
  int iterations = 200;
  int convergence_runs = 20;
  double bound_slack_fraction = 0.10;  // tail <= bound * (1 + slack)
  double ratio_floor = 1.0;            // check ratios only while d_t >= floor
  double initial_offset = 32.0;
  // Variance checks.
  int variance_cases = 100;
  int variance_dim = 64;
  double variance_alpha = 0.1;
  int variance_trials = 100000;
  int phi_sweep = 1000;
};

// Runs the whole numerical-theory suite: metric axioms and invariances of
// the empirical W1 distance, the Bellman contraction sweep, perturbed
// value-distribution iteration against its bound, the sign of the
// variance-gap derivative, and the closed-form vs Monte-Carlo gradient
// variances.
std::vector<CheckResult> run_theory_checks(const CheckConfig& config);

}  // namespace flowcritic::analysis
