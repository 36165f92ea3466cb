#pragma once

#include <vector>

#include "flowcritic/common/rng.hpp"

namespace flowcritic::analysis {

// Equal-weight finite-support approximation of a return distribution.
struct ParticleDistribution {
  std::vector<double> support;
};

// Maps every particle z -> a*z + c.
ParticleDistribution shift_scale(const ParticleDistribution& dist, double a,
                                 double c);

// Finite MDP under a fixed policy: per-state successor kernel and a
// state-dependent reward.
struct TabularDistMDP {
  std::vector<double> reward;                    // r(s)
  std::vector<std::vector<double>> transition;   // P(s'|s), rows sum to 1
  double gamma = 0.99;

  int num_states() const { return static_cast<int>(reward.size()); }
  void validate() const;
};

// One application of the distributional Bellman operator: for each state,
// the mixture over successors of (r(s) + gamma * particles(s')), reduced
// back to the original particle count by systematic resampling (one
// uniform offset per state drawn from rng).
std::vector<ParticleDistribution> apply_bellman(
    const TabularDistMDP& mdp, const std::vector<ParticleDistribution>& dists,
    Rng& rng);

// Supremum empirical W1 over states.
double sup_w1(const std::vector<ParticleDistribution>& p,
              const std::vector<ParticleDistribution>& q);

struct ConvergenceReport {
  std::vector<double> distances;  // d_t = sup-W1(p_t, fixed point)
  double eps_max = 0.0;
  double bound = 0.0;  // eps_max / (1 - gamma)
};

// Iterates p <- perturb(T p) where perturb shifts each state's particles by
// an independent uniform offset in [-eps_max, eps_max], and records the
// distance to the fixed point (precomputed by running the exact operator to
// numerical convergence). initial_offset shifts the starting distribution
// away from the fixed point so contraction ratios are observable.
ConvergenceReport convergence_experiment(const TabularDistMDP& mdp,
                                         double eps_max, int iterations,
                                         int particles, std::uint64_t seed,
                                         double initial_offset = 0.0);

}  // namespace flowcritic::analysis
