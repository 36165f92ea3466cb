#include "flowcritic/flow/flow_critic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <utility>

#include "flowcritic/common/errors.hpp"

namespace flowcritic::flow {

namespace {
constexpr double kCovGuard = 1e-8;

std::vector<int> velocity_layers(int state_dim, const std::vector<int>& hidden) {
  std::vector<int> sizes;
  sizes.push_back(state_dim + 2);  // (o, t, s)
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return sizes;
}
}  // namespace

double interpolate(double prior_eps, double target, double path_time) {
  if (path_time < 0.0 || path_time > 1.0)
    throw std::domain_error("interpolate: path time must lie in [0,1]");
  return (1.0 - path_time) * prior_eps + path_time * target;
}

double conditional_velocity(double prior_eps, double target) {
  return target - prior_eps;
}

double clipped_velocity(double v_new, double v_old, double delta) {
  if (delta <= 0.0)
    throw std::invalid_argument("clipped_velocity: delta must be positive");
  return v_old + std::clamp(v_new - v_old, -delta, delta);
}

double cov_weight(double kappa, double alpha) {
  if (kappa < 0.0) throw std::invalid_argument("cov_weight: kappa must be >= 0");
  if (alpha <= 0.0) throw std::invalid_argument("cov_weight: alpha must be > 0");
  // exp underflows to zero near kappa ~ 7e5/alpha; keep the weight in the
  // promised (0, 1] range so downstream normalization stays well-defined.
  return std::max(std::exp(-alpha * kappa),
                  std::numeric_limits<double>::min());
}

std::vector<double> normalize_weights(std::span<const double> weights) {
  if (weights.empty())
    throw std::invalid_argument("normalize_weights: empty weight vector");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0))
      throw std::invalid_argument("normalize_weights: weights must be positive");
    total += w;
  }
  const double scale = static_cast<double>(weights.size()) / total;
  std::vector<double> out(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) out[i] = weights[i] * scale;
  return out;
}

ValueSampleSet summarize_value_samples(std::vector<double> samples, int m) {
  const int n = static_cast<int>(samples.size());
  if (n < 1) throw std::invalid_argument("value samples: empty set");
  if (m < 0 || m >= n)
    throw std::invalid_argument("value samples: need 0 <= m < n");

  ValueSampleSet set;
  set.truncation = m;

  double sum = 0.0;
  for (double z : samples) sum += z;
  set.mean = sum / n;

  double sq = 0.0;
  for (double z : samples) {
    const double d = z - set.mean;
    sq += d * d;
  }
  set.stddev = std::sqrt(sq / n);
  set.cov = set.stddev / (std::abs(set.mean) + kCovGuard);

  std::vector<double> sorted(samples);
  std::stable_sort(sorted.begin(), sorted.end());
  double trunc_sum = 0.0;
  for (int i = 0; i < n - m; ++i) trunc_sum += sorted[i];
  set.truncated_value = trunc_sum / (n - m);

  set.samples = std::move(samples);
  return set;
}

void append_sample_set_csv(const std::string& path, std::int64_t state_id,
                           const ValueSampleSet& set) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("sample-set csv: cannot open " + path);
  if (fresh) out << "state_id,i,z\n";
  char line[64];
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    std::snprintf(line, sizeof(line), "%lld,%zu,%.10g\n",
                  static_cast<long long>(state_id), i, set.samples[i]);
    out << line;
  }
}

FlowTrainingSample make_training_sample(std::vector<double> state,
                                        double prior_eps, double target,
                                        double path_time) {
  FlowTrainingSample s;
  s.state = std::move(state);
  s.prior_eps = prior_eps;
  s.target = target;
  s.path_time = path_time;
  s.path_point = interpolate(prior_eps, target, path_time);
  s.conditional_velocity = conditional_velocity(prior_eps, target);
  return s;
}

FlowCritic::FlowCritic(int state_dim, const std::vector<int>& hidden,
                       nn::Activation activation, int euler_steps,
                       double clip_delta)
    : state_dim_(state_dim),
      euler_steps_(euler_steps),
      delta_t_(1.0 / euler_steps),
      clip_delta_(clip_delta),
      velocity_net_(velocity_layers(state_dim, hidden), activation) {
  if (euler_steps <= 0)
    throw std::invalid_argument("FlowCritic: euler_steps must be positive");
  if (clip_delta <= 0.0)
    throw std::invalid_argument("FlowCritic: clip delta must be positive");
}

void FlowCritic::init(Rng& rng) { velocity_net_.init_uniform(rng); }

void FlowCritic::fill_input(std::span<const double> state, double path_point,
                            double path_time, std::vector<double>& input) const {
  if (static_cast<int>(state.size()) != state_dim_)
    throw std::invalid_argument("FlowCritic: state dimension mismatch");
  input.resize(state_dim_ + 2);
  input[0] = path_point;
  input[1] = path_time;
  std::copy(state.begin(), state.end(), input.begin() + 2);
}

double FlowCritic::velocity(std::span<const double> state, double path_point,
                            double path_time) const {
  std::vector<double> input;
  fill_input(state, path_point, path_time, input);
  return velocity_net_.forward(input)[0];
}

double FlowCritic::euler_sample(std::span<const double> state,
                                double prior_eps) const {
  if (!std::isfinite(prior_eps))
    throw NumericError("euler_sample: non-finite prior draw");
  std::vector<double> input;
  double o = prior_eps;
  for (int k = 0; k < euler_steps_; ++k) {
    const double t = k * delta_t_;
    fill_input(state, o, t, input);
    o += delta_t_ * velocity_net_.forward(input)[0];
    if (!std::isfinite(o))
      throw NumericError("euler_sample: non-finite ODE state");
  }
  return o;
}

ValueSampleSet FlowCritic::sample_value_set(std::span<const double> state,
                                            int n, int m, Rng& rng) const {
  if (n < 2) throw std::invalid_argument("sample_value_set: need n >= 2");
  if (m < 0 || m >= n)
    throw std::invalid_argument("sample_value_set: need 0 <= m < n");
  std::vector<double> samples(n);
  for (int i = 0; i < n; ++i) samples[i] = euler_sample(state, rng.gaussian());
  return summarize_value_samples(std::move(samples), m);
}

const nn::Mlp& FlowCritic::target_net() const {
  if (!target_net_)
    throw StateError("FlowCritic: no target snapshot taken yet");
  return *target_net_;
}

void FlowCritic::snapshot_target() { target_net_ = velocity_net_; }

double FlowCritic::clipped_cfm_loss(std::span<const FlowTrainingSample> batch) {
  if (!target_net_)
    throw StateError("clipped_cfm_loss: target snapshot required");
  if (batch.empty())
    throw std::invalid_argument("clipped_cfm_loss: empty batch");

  velocity_net_.zero_grad();
  std::vector<double> input;
  nn::ForwardTrace trace;
  double loss_sum = 0.0;
  for (const FlowTrainingSample& s : batch) {
    fill_input(s.state, s.path_point, s.path_time, input);
    const double v_new = velocity_net_.forward(input, trace)[0];
    const double v_old = target_net_->forward(input)[0];
    const double v_clip = clipped_velocity(v_new, v_old, clip_delta_);
    const double u = s.conditional_velocity;

    const double unclipped = (v_new - u) * (v_new - u);
    const double clipped = (v_clip - u) * (v_clip - u);
    loss_sum += std::max(unclipped, clipped);

    // Gradients flow through v_new only. When the clipped branch wins the
    // max, v_clip is saturated and constant in theta, so the sample
    // contributes no gradient.
    if (unclipped >= clipped) {
      const double dl[1] = {2.0 * (v_new - u)};
      velocity_net_.backward(trace, dl);
    }
  }
  velocity_net_.scale_grad(1.0 / static_cast<double>(batch.size()));
  return loss_sum / static_cast<double>(batch.size());
}

}  // namespace flowcritic::flow
