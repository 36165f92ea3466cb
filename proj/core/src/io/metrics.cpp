#include "flowcritic/io/metrics.hpp"

#include <stdexcept>

#include <json.hpp>

namespace flowcritic::io {

std::string metrics_line(const rl::IterationMetrics& m) {
  nlohmann::ordered_json j;
  j["iter"] = m.iteration;
  j["steps"] = m.env_steps;
  j["ep_return_mean"] = m.ep_return_mean;
  j["critic_loss"] = m.critic_loss;
  j["policy_objective"] = m.policy_objective;
  j["kappa_mean"] = m.kappa_mean;
  j["weight_mean"] = m.weight_mean;
  j["policy_grad_norm"] = m.policy_grad_norm;
  j["critic_grad_norm"] = m.critic_grad_norm;
  j["numeric_aborts"] = m.numeric_aborts;
  j["aborted"] = m.aborted;
  return j.dump();
}

MetricsWriter::MetricsWriter(const std::string& path) : out_(path) {
  if (!out_) throw std::runtime_error("metrics: cannot open " + path);
}

void MetricsWriter::write(const rl::IterationMetrics& m) {
  out_ << metrics_line(m) << "\n";
  out_.flush();
}

}  // namespace flowcritic::io
