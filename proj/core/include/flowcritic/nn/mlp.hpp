#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "flowcritic/common/rng.hpp"

namespace flowcritic::nn {

enum class Activation { kTanh, kRelu, kIdentity };

// Per-call scratch for one forward pass. Owned by the caller so that
// read-only forward passes on a shared network can run concurrently.
struct ForwardTrace {
  std::vector<std::vector<double>> layer_inputs;  // input to each affine layer
  std::vector<std::vector<double>> pre_activations;
  bool valid = false;
};

// Fully-connected network with a flat parameter vector and a matching
// gradient accumulator. Hidden layers share one activation; the output
// layer is linear. Parameters are laid out per layer as the row-major
// weight matrix followed by the bias vector.
class Mlp {
 public:
  Mlp(std::vector<int> layer_sizes, Activation hidden_activation);
  Mlp(std::vector<int> layer_sizes, std::vector<Activation> hidden_activations);

  // Uniform init in [-sqrt(1/fan_in), +sqrt(1/fan_in)] per layer.
  void init_uniform(Rng& rng);

  std::vector<double> forward(std::span<const double> input) const;
  std::vector<double> forward(std::span<const double> input,
                              ForwardTrace& trace) const;

  // Accumulates d(loss)/d(params) given d(loss)/d(output); repeated calls
  // sum into the accumulator. Requires a trace from a prior forward pass.
  void backward(const ForwardTrace& trace, std::span<const double> output_grad);

  void zero_grad();
  void scale_grad(double factor);

  int input_dim() const { return layer_sizes_.front(); }
  int output_dim() const { return layer_sizes_.back(); }
  std::size_t param_count() const { return params_.size(); }
  int num_layers() const { return static_cast<int>(layer_sizes_.size()) - 1; }

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  const std::vector<Activation>& hidden_activations() const {
    return hidden_activations_;
  }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::span<double> grads() { return grads_; }
  std::span<const double> grads() const { return grads_; }

  static std::size_t expected_param_count(const std::vector<int>& layer_sizes);

 private:
  std::vector<int> layer_sizes_;
  std::vector<Activation> hidden_activations_;  // one per hidden layer
  std::vector<double> params_;
  std::vector<double> grads_;
  std::vector<std::size_t> layer_offsets_;  // offset of each layer's weights
};

}  // namespace flowcritic::nn
