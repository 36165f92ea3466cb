#pragma once

#include <string>
#include <vector>

#include "flowcritic/rl/config.hpp"
#include "flowcritic/rl/trainer.hpp"

namespace flowcritic::experiments {

struct RunSummary {
  std::vector<rl::IterationMetrics> history;
  double final_return = 0.0;  // mean ep_return over the final 10% of iterations
  bool numeric_failure = false;
};

// Trains until the step budget. When run_dir is nonempty the effective
// config is echoed there before any computation and metrics stream to
// metrics.jsonl; checkpoints are written at the end.
RunSummary run_training(const rl::TrainConfig& config,
                        const std::string& run_dir);

struct BenchRow {
  rl::CriticKind kind;
  double mean = 0.0;  // over seeds, of final_return
  double stddev = 0.0;
  std::vector<double> per_seed;
};

// Trains every critic kind on one environment across the given seeds and
// aggregates the final-10% returns. Per-run artifacts land in
// <run_dir>/<critic>-seed<seed>/ when run_dir is nonempty.
std::vector<BenchRow> run_bench(const rl::TrainConfig& base,
                                const std::vector<std::uint64_t>& seeds,
                                const std::string& run_dir);

std::string bench_table(const std::vector<BenchRow>& rows);

}  // namespace flowcritic::experiments
