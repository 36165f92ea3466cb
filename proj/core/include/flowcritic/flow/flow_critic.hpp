#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowcritic/common/rng.hpp"
#include "flowcritic/nn/mlp.hpp"

namespace flowcritic::flow {

// Linear interpolation path between a prior draw and a return target.
double interpolate(double prior_eps, double target, double path_time);

// Velocity of the linear path; independent of the path time.
double conditional_velocity(double prior_eps, double target);

// Constrains the new prediction to lie within +-delta of the old one.
double clipped_velocity(double v_new, double v_old, double delta);

// Per-state sample weight exp(-alpha * kappa).
double cov_weight(double kappa, double alpha);

// Rescales positive weights so their sum equals their count; relative
// ordering is preserved.
std::vector<double> normalize_weights(std::span<const double> weights);

// n generated returns for one state together with their summary statistics.
// kappa uses all n samples; the truncated value drops the largest m.
struct ValueSampleSet {
  std::vector<double> samples;
  double mean = 0.0;
  double stddev = 0.0;  // population (1/n)
  double cov = 0.0;
  double truncated_value = 0.0;
  int truncation = 0;
};

// Builds the summary for an existing sample vector (the generation-free
// half of sample_value_set, also the injection point for tests).
ValueSampleSet summarize_value_samples(std::vector<double> samples, int m);

// Debug export: one "state_id,i,z_i" row per sample, with a header on a
// fresh file. Appends so per-state sets can be streamed into one table.
void append_sample_set_csv(const std::string& path, std::int64_t state_id,
                           const ValueSampleSet& set);

// One training pair for the conditional flow-matching loss.
struct FlowTrainingSample {
  std::vector<double> state;
  double prior_eps = 0.0;
  double target = 0.0;
  double path_time = 0.0;
  double path_point = 0.0;            // interpolate(prior_eps, target, t)
  double conditional_velocity = 0.0;  // target - prior_eps
};

FlowTrainingSample make_training_sample(std::vector<double> state,
                                        double prior_eps, double target,
                                        double path_time);

// Generative value critic: a velocity field net f(o, t, s) -> velocity and
// a frozen copy used both for velocity clipping and as the "old" field.
// Samples are produced by Euler-integrating the field from t=0 to t=1.
class FlowCritic {
 public:
  FlowCritic(int state_dim, const std::vector<int>& hidden,
             nn::Activation activation, int euler_steps, double clip_delta);

  void init(Rng& rng);

  // f_theta(o, t, s) under the online parameters.
  double velocity(std::span<const double> state, double path_point,
                  double path_time) const;

  // The map F_theta(s, eps): integrates the ODE with euler_steps fixed
  // steps of size 1/euler_steps.
  double euler_sample(std::span<const double> state, double prior_eps) const;

  // Draws n prior samples, pushes each through the flow, and summarizes.
  ValueSampleSet sample_value_set(std::span<const double> state, int n, int m,
                                  Rng& rng) const;

  // Mean clipped CFM loss over the batch; accumulates gradients for the
  // online velocity net (targets and old velocities are constants).
  // Requires snapshot_target() to have been called.
  double clipped_cfm_loss(std::span<const FlowTrainingSample> batch);

  // Freezes a deep copy of the online net as the clipping reference.
  void snapshot_target();
  bool has_target() const { return target_net_.has_value(); }

  nn::Mlp& velocity_net() { return velocity_net_; }
  const nn::Mlp& velocity_net() const { return velocity_net_; }
  const nn::Mlp& target_net() const;

  int state_dim() const { return state_dim_; }
  int euler_steps() const { return euler_steps_; }
  double delta_t() const { return delta_t_; }
  double clip_delta() const { return clip_delta_; }

 private:
  void fill_input(std::span<const double> state, double path_point,
                  double path_time, std::vector<double>& input) const;

  int state_dim_;
  int euler_steps_;
  double delta_t_;
  double clip_delta_;
  nn::Mlp velocity_net_;
  std::optional<nn::Mlp> target_net_;
};

}  // namespace flowcritic::flow
