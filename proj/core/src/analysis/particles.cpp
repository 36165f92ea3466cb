#include "flowcritic/analysis/particles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "flowcritic/analysis/wasserstein.hpp"

namespace flowcritic::analysis {

ParticleDistribution shift_scale(const ParticleDistribution& dist, double a,
                                 double c) {
  ParticleDistribution out;
  out.support.reserve(dist.support.size());
  for (double z : dist.support) out.support.push_back(a * z + c);
  return out;
}

void TabularDistMDP::validate() const {
  if (reward.empty()) throw std::invalid_argument("TabularDistMDP: no states");
  if (transition.size() != reward.size())
    throw std::invalid_argument("TabularDistMDP: kernel/reward size mismatch");
  if (gamma < 0.0 || gamma >= 1.0)
    throw std::invalid_argument("TabularDistMDP: gamma must lie in [0,1)");
  for (const auto& row : transition) {
    if (row.size() != reward.size())
      throw std::invalid_argument("TabularDistMDP: kernel row size mismatch");
    double sum = std::accumulate(row.begin(), row.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("TabularDistMDP: kernel rows must sum to 1");
  }
}

std::vector<ParticleDistribution> apply_bellman(
    const TabularDistMDP& mdp, const std::vector<ParticleDistribution>& dists,
    Rng& rng) {
  mdp.validate();
  const int n_states = mdp.num_states();
  if (static_cast<int>(dists.size()) != n_states)
    throw std::invalid_argument("apply_bellman: one distribution per state");
  const std::size_t n_particles = dists.front().support.size();
  for (const auto& d : dists)
    if (d.support.size() != n_particles)
      throw std::invalid_argument("apply_bellman: equal particle counts required");

  std::vector<ParticleDistribution> out(n_states);
  std::vector<std::pair<double, double>> mixture;  // (value, weight)
  for (int s = 0; s < n_states; ++s) {
    mixture.clear();
    for (int sp = 0; sp < n_states; ++sp) {
      const double w = mdp.transition[s][sp];
      if (w == 0.0) continue;
      const double pw = w / static_cast<double>(n_particles);
      for (double z : dists[sp].support)
        mixture.emplace_back(mdp.reward[s] + mdp.gamma * z, pw);
    }
    std::sort(mixture.begin(), mixture.end());

    // Systematic resampling: quantiles of the mixture at (u + i) / P.
    const double u = rng.uniform01();
    auto& support = out[s].support;
    support.resize(n_particles);
    std::size_t j = 0;
    double cumulative = mixture[0].second;
    for (std::size_t i = 0; i < n_particles; ++i) {
      const double level =
          (u + static_cast<double>(i)) / static_cast<double>(n_particles);
      while (cumulative < level && j + 1 < mixture.size()) {
        ++j;
        cumulative += mixture[j].second;
      }
      support[i] = mixture[j].first;
    }
  }
  return out;
}

double sup_w1(const std::vector<ParticleDistribution>& p,
              const std::vector<ParticleDistribution>& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("sup_w1: state counts differ");
  double sup = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s)
    sup = std::max(sup, empirical_w1(p[s].support, q[s].support));
  return sup;
}

ConvergenceReport convergence_experiment(const TabularDistMDP& mdp,
                                         double eps_max, int iterations,
                                         int particles, std::uint64_t seed,
                                         double initial_offset) {
  mdp.validate();
  if (eps_max < 0.0)
    throw std::invalid_argument("convergence_experiment: eps_max must be >= 0");
  if (iterations <= 0 || particles <= 0)
    throw std::invalid_argument("convergence_experiment: positive sizes required");

  const int n_states = mdp.num_states();
  auto point_mass = [&](double v) {
    std::vector<ParticleDistribution> d(n_states);
    for (auto& dist : d) dist.support.assign(particles, v);
    return d;
  };

  // Fixed point by exact iteration; gamma^200 of any initial error is far
  // below the resampling floor.
  Rng fix_rng(seed, Rng::mix(streams::kChecks, 0x11));
  auto fixed = point_mass(0.0);
  for (int i = 0; i < 200; ++i) fixed = apply_bellman(mdp, fixed, fix_rng);

  Rng run_rng(seed, Rng::mix(streams::kChecks, 0x12));
  std::vector<ParticleDistribution> p(n_states);
  for (int s = 0; s < n_states; ++s)
    p[s] = shift_scale(fixed[s], 1.0, initial_offset);

  ConvergenceReport report;
  report.eps_max = eps_max;
  report.bound = eps_max / (1.0 - mdp.gamma);
  report.distances.reserve(iterations);
  for (int i = 0; i < iterations; ++i) {
    p = apply_bellman(mdp, p, run_rng);
    if (eps_max > 0.0) {
      for (int s = 0; s < n_states; ++s) {
        const double offset = run_rng.uniform(-eps_max, eps_max);
        for (double& z : p[s].support) z += offset;
      }
    }
    report.distances.push_back(sup_w1(p, fixed));
  }
  return report;
}

}  // namespace flowcritic::analysis
