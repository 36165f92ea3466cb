#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowcritic/analysis/error_maps.hpp"

namespace flowcritic::experiments {

// Single-step value-estimation study. Both critics fit the same noisy
// reward stream under the on-policy schedule (a fresh batch of states per
// iteration, several epochs of minibatch updates over it, then the data is
// discarded), and are then evaluated against the exact value surface over
// the full grid.
struct ToyConfig {
  std::uint64_t seed = 0;
  int train_samples = 200000;      // total stream length
  int iteration_samples = 2048;    // fresh draws per iteration
  int epochs = 16;                 // passes over each iteration's data
  int batch_size = 256;
  double learning_rate = 5e-4;
  double grad_norm = 1.0;
  std::vector<int> hidden{64, 64, 64};  // identical trunk for both critics
  int euler_steps = 5;
  double velocity_clip = 0.2;
  // Evaluation sampling for the truncated estimate and the CoV map. A large
  // sample count keeps the per-cell Monte-Carlo error well below the map
  // contrasts; truncation drops the single largest draw.
  int eval_samples = 600;
  int eval_truncation = 1;
  int grid_n = 61;
  double grid_lo = -3.0;
  double grid_hi = 3.0;
};

struct ToyResult {
  analysis::GridMap err_point;
  analysis::GridMap err_flow;
  analysis::GridMap cov_flow;

  analysis::RegionStats point_stats[3];  // disk, train ring, outside
  analysis::RegionStats flow_stats[3];
  analysis::RegionStats cov_stats[3];

  // Headline comparisons used by the command-line report.
  bool point_max_disk_error_exceeds(double threshold) const;
  bool flow_mae_below_point_in_disk() const;
  bool cov_disk_above_train_ring() const;
  bool cov_outside_above_train() const;
  double cov_train_mean() const;  // over all of [-2,2]^2
};

ToyResult run_toy_experiment(const ToyConfig& config);

// Writes error_point.csv, error_flow.csv, cov_flow.csv and summary.txt.
void write_toy_outputs(const ToyResult& result, const ToyConfig& config,
                       const std::string& dir);

}  // namespace flowcritic::experiments
