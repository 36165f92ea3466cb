#include "flowcritic/experiments/toy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

#include "flowcritic/common/parallel.hpp"
#include "flowcritic/common/rng.hpp"
#include "flowcritic/envs/single_step.hpp"
#include "flowcritic/flow/flow_critic.hpp"
#include "flowcritic/nn/adam.hpp"
#include "flowcritic/nn/mlp.hpp"

namespace flowcritic::experiments {

bool ToyResult::point_max_disk_error_exceeds(double threshold) const {
  return point_stats[0].max > threshold;
}

bool ToyResult::flow_mae_below_point_in_disk() const {
  return flow_stats[0].mean < point_stats[0].mean;
}

bool ToyResult::cov_disk_above_train_ring() const {
  return cov_stats[0].mean > cov_stats[1].mean;
}

double ToyResult::cov_train_mean() const {
  const int cells = cov_stats[0].cells + cov_stats[1].cells;
  return (cov_stats[0].mean * cov_stats[0].cells +
          cov_stats[1].mean * cov_stats[1].cells) /
         cells;
}

bool ToyResult::cov_outside_above_train() const {
  return cov_stats[2].mean > cov_train_mean();
}

ToyResult run_toy_experiment(const ToyConfig& config) {
  // Identical trunks; the velocity net takes (o, t, x, y).
  std::vector<int> point_layers{2};
  point_layers.insert(point_layers.end(), config.hidden.begin(),
                      config.hidden.end());
  point_layers.push_back(1);
  nn::Mlp point_net(point_layers, nn::Activation::kRelu);
  flow::FlowCritic flow_critic(2, config.hidden, nn::Activation::kRelu,
                               config.euler_steps, config.velocity_clip);
  {
    Rng init_point(config.seed, Rng::mix(streams::kCriticInit, 100));
    point_net.init_uniform(init_point);
    Rng init_flow(config.seed, Rng::mix(streams::kCriticInit, 101));
    flow_critic.init(init_flow);
  }
  nn::AdamState point_adam(point_net.param_count(), config.learning_rate);
  nn::AdamState flow_adam(flow_critic.velocity_net().param_count(),
                          config.learning_rate);

  Rng data_rng(config.seed, streams::kToyData);
  Rng path_rng(config.seed, streams::kFlowPath);
  Rng shuffle_rng(config.seed, Rng::mix(streams::kShuffle, 100));

  const int per_iter = config.iteration_samples;
  const int iterations = config.train_samples / per_iter;
  std::vector<double> xs(per_iter), ys(per_iter), rewards(per_iter);
  std::vector<int> indices(per_iter);
  std::vector<flow::FlowTrainingSample> batch;
  nn::ForwardTrace trace;

  for (int iter = 0; iter < iterations; ++iter) {
    for (int i = 0; i < per_iter; ++i) {
      auto [x, y] = envs::toy_sample_state(data_rng, envs::ToyRegion::kTrain);
      xs[i] = x;
      ys[i] = y;
      rewards[i] = envs::toy_reward(x, y, data_rng);
      indices[i] = i;
    }
    flow_critic.snapshot_target();

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      for (std::size_t i = indices.size() - 1; i > 0; --i) {
        const std::size_t j = shuffle_rng.below(i + 1);
        std::swap(indices[i], indices[j]);
      }
      for (int start = 0; start < per_iter; start += config.batch_size) {
        const int stop = std::min(start + config.batch_size, per_iter);
        const int batch_n = stop - start;

        // Point critic: squared-error fit of the noisy rewards.
        point_net.zero_grad();
        for (int b = start; b < stop; ++b) {
          const int i = indices[b];
          const double input[2] = {xs[i], ys[i]};
          const double v = point_net.forward(input, trace)[0];
          const double grad[1] = {2.0 * (v - rewards[i])};
          point_net.backward(trace, grad);
        }
        point_net.scale_grad(1.0 / batch_n);
        nn::clip_global_norm(point_net.grads(), config.grad_norm);
        nn::adam_step(point_net, point_adam);

        // Flow critic: clipped CFM loss toward the same reward samples,
        // with a fresh prior draw and path time per sample per epoch.
        batch.clear();
        for (int b = start; b < stop; ++b) {
          const int i = indices[b];
          const double eps = path_rng.gaussian();
          const double t = path_rng.uniform01();
          batch.push_back(flow::make_training_sample({xs[i], ys[i]}, eps,
                                                     rewards[i], t));
        }
        flow_critic.clipped_cfm_loss(batch);
        nn::clip_global_norm(flow_critic.velocity_net().grads(),
                             config.grad_norm);
        nn::adam_step(flow_critic.velocity_net(), flow_adam);
      }
    }
  }

  // Grid evaluation against the exact value surface.
  ToyResult result;
  const int gn = config.grid_n;
  result.err_point.n = result.err_flow.n = result.cov_flow.n = gn;
  result.err_point.lo = result.err_flow.lo = result.cov_flow.lo = config.grid_lo;
  result.err_point.hi = result.err_flow.hi = result.cov_flow.hi = config.grid_hi;
  const std::size_t cells = static_cast<std::size_t>(gn) * gn;
  result.err_point.values.resize(cells);
  result.err_flow.values.resize(cells);
  result.cov_flow.values.resize(cells);

  parallel_for(cells, [&](std::size_t cell) {
    const int ix = static_cast<int>(cell) % gn;
    const int iy = static_cast<int>(cell) / gn;
    const double x = result.err_point.coord(ix);
    const double y = result.err_point.coord(iy);
    const double truth = envs::toy_true_value(x, y);

    const double state[2] = {x, y};
    result.err_point.values[cell] =
        std::abs(point_net.forward(state)[0] - truth);

    Rng rng(config.seed, Rng::mix(streams::kToyEval, cell));
    const flow::ValueSampleSet set = flow_critic.sample_value_set(
        state, config.eval_samples, config.eval_truncation, rng);
    result.err_flow.values[cell] = std::abs(set.truncated_value - truth);
    result.cov_flow.values[cell] = set.cov;
  });

  const analysis::ToyRegionKind regions[3] = {
      analysis::ToyRegionKind::kDisk,
      analysis::ToyRegionKind::kTrainOutsideDisk,
      analysis::ToyRegionKind::kOutsideTrain};
  for (int r = 0; r < 3; ++r) {
    result.point_stats[r] = analysis::region_stats(result.err_point, regions[r]);
    result.flow_stats[r] = analysis::region_stats(result.err_flow, regions[r]);
    result.cov_stats[r] = analysis::region_stats(result.cov_flow, regions[r]);
  }
  return result;
}

void write_toy_outputs(const ToyResult& result, const ToyConfig& config,
                       const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  analysis::write_grid_csv((fs::path(dir) / "error_point.csv").string(),
                           result.err_point, "err_point");
  analysis::write_grid_csv((fs::path(dir) / "error_flow.csv").string(),
                           result.err_flow, "err_flow");
  analysis::write_grid_csv((fs::path(dir) / "cov_flow.csv").string(),
                           result.cov_flow, "cov");

  std::ofstream out(fs::path(dir) / "summary.txt");
  char line[160];
  auto emit = [&](const std::string& name, double v) {
    std::snprintf(line, sizeof(line), "%s = %.10g\n", name.c_str(), v);
    out << line;
  };
  const char* region_names[3] = {"disk", "train_ring", "outside_train"};
  for (int r = 0; r < 3; ++r) {
    const std::string prefix = std::string("point.") + region_names[r];
    emit(prefix + ".mae", result.point_stats[r].mean);
    emit(prefix + ".max", result.point_stats[r].max);
  }
  for (int r = 0; r < 3; ++r) {
    const std::string prefix = std::string("flow.") + region_names[r];
    emit(prefix + ".mae", result.flow_stats[r].mean);
    emit(prefix + ".max", result.flow_stats[r].max);
  }
  for (int r = 0; r < 3; ++r) {
    const std::string prefix = std::string("cov.") + region_names[r];
    emit(prefix + ".mean", result.cov_stats[r].mean);
    emit(prefix + ".max", result.cov_stats[r].max);
  }
  emit("cov.train.mean", result.cov_train_mean());
  emit("config.train_samples", config.train_samples);
  emit("config.iteration_samples", config.iteration_samples);
  emit("config.epochs", config.epochs);
  emit("config.batch_size", config.batch_size);
  emit("config.lr", config.learning_rate);
  emit("config.delta", config.velocity_clip);
  emit("config.eval_samples", config.eval_samples);
  emit("config.eval_truncation", config.eval_truncation);
  emit("config.seed", static_cast<double>(config.seed));
}

}  // namespace flowcritic::experiments
