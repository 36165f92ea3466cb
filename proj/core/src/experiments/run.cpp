#include "flowcritic/experiments/run.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <sstream>

#include "flowcritic/io/metrics.hpp"

namespace flowcritic::experiments {

namespace fs = std::filesystem;

RunSummary run_training(const rl::TrainConfig& config,
                        const std::string& run_dir) {
  std::unique_ptr<io::MetricsWriter> writer;
  if (!run_dir.empty()) {
    fs::create_directories(run_dir);
    rl::TrainConfig echoed = config;
    echoed.run_dir = run_dir;
    echoed.write_json_file((fs::path(run_dir) / "config.json").string());
    writer = std::make_unique<io::MetricsWriter>(
        (fs::path(run_dir) / "metrics.jsonl").string());
  }

  rl::Trainer trainer(config);
  RunSummary summary;
  while (trainer.env_steps() < config.total_steps) {
    const rl::IterationMetrics m = trainer.run_iteration();
    if (writer) writer->write(m);
    summary.history.push_back(m);
    if (m.aborted) {
      summary.numeric_failure = true;
      break;
    }
  }

  if (!run_dir.empty()) trainer.save_checkpoints(run_dir);

  if (!summary.history.empty()) {
    const std::size_t n = summary.history.size();
    const std::size_t tail = std::max<std::size_t>(1, n / 10);
    double sum = 0.0;
    for (std::size_t i = n - tail; i < n; ++i)
      sum += summary.history[i].ep_return_mean;
    summary.final_return = sum / static_cast<double>(tail);
  }
  return summary;
}

std::vector<BenchRow> run_bench(const rl::TrainConfig& base,
                                const std::vector<std::uint64_t>& seeds,
                                const std::string& run_dir) {
  const rl::CriticKind kinds[] = {
      rl::CriticKind::kFlow, rl::CriticKind::kPoint,
      rl::CriticKind::kAvgEnsemble, rl::CriticKind::kMinEnsemble,
      rl::CriticKind::kQuantile};

  std::vector<BenchRow> rows;
  for (rl::CriticKind kind : kinds) {
    BenchRow row;
    row.kind = kind;
    for (std::uint64_t seed : seeds) {
      rl::TrainConfig config = base;
      config.critic_kind = kind;
      config.seed = seed;
      std::string sub;
      if (!run_dir.empty()) {
        sub = (fs::path(run_dir) /
               (rl::to_string(kind) + "-seed" + std::to_string(seed)))
                  .string();
      }
      const RunSummary summary = run_training(config, sub);
      row.per_seed.push_back(summary.final_return);
    }
    double sum = 0.0;
    for (double v : row.per_seed) sum += v;
    row.mean = sum / static_cast<double>(row.per_seed.size());
    double var = 0.0;
    for (double v : row.per_seed) var += (v - row.mean) * (v - row.mean);
    row.stddev = row.per_seed.size() > 1
                     ? std::sqrt(var / static_cast<double>(row.per_seed.size() - 1))
                     : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string bench_table(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "critic          mean      std       per-seed\n";
  char buf[96];
  for (const BenchRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%-14s %9.4f %9.4f  ",
                  rl::to_string(row.kind).c_str(), row.mean, row.stddev);
    out << buf;
    for (double v : row.per_seed) {
      std::snprintf(buf, sizeof(buf), " %.4f", v);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace flowcritic::experiments
