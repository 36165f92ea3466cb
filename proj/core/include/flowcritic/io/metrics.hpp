#pragma once

#include <fstream>
#include <string>

#include "flowcritic/rl/trainer.hpp"

namespace flowcritic::io {

// Line-delimited metric records with a fixed field order so identical runs
// produce byte-identical files.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path);

  void write(const rl::IterationMetrics& m);

 private:
  std::ofstream out_;
};

std::string metrics_line(const rl::IterationMetrics& m);

}  // namespace flowcritic::io
