#include "flowcritic/nn/mlp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "flowcritic/common/errors.hpp"

namespace flowcritic::nn {

namespace {

using MatrixRM =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<MatrixRM>;
using MapConstMat = Eigen::Map<const MatrixRM>;
using MapVec = Eigen::Map<Eigen::VectorXd>;
using MapConstVec = Eigen::Map<const Eigen::VectorXd>;

double activate(Activation act, double x) {
  switch (act) {
    case Activation::kTanh:
      return std::tanh(x);
    case Activation::kRelu:
      return x > 0.0 ? x : 0.0;
    case Activation::kIdentity:
      return x;
  }
  return x;
}

double activate_grad(Activation act, double pre) {
  switch (act) {
    case Activation::kTanh: {
      double t = std::tanh(pre);
      return 1.0 - t * t;
    }
    case Activation::kRelu:
      return pre > 0.0 ? 1.0 : 0.0;
    case Activation::kIdentity:
      return 1.0;
  }
  return 1.0;
}

std::vector<int> check_sizes(std::vector<int> sizes) {
  if (sizes.size() < 2)
    throw std::invalid_argument("Mlp: need at least input and output sizes");
  for (int s : sizes)
    if (s <= 0) throw std::invalid_argument("Mlp: layer sizes must be positive");
  return sizes;
}

}  // namespace

std::size_t Mlp::expected_param_count(const std::vector<int>& layer_sizes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    n += static_cast<std::size_t>(layer_sizes[l] + 1) * layer_sizes[l + 1];
  }
  return n;
}

Mlp::Mlp(std::vector<int> layer_sizes, Activation hidden_activation)
    : Mlp(std::move(layer_sizes),
          std::vector<Activation>{}) {
  hidden_activations_.assign(static_cast<std::size_t>(num_layers() - 1),
                             hidden_activation);
}

Mlp::Mlp(std::vector<int> layer_sizes, std::vector<Activation> hidden_activations)
    : layer_sizes_(check_sizes(std::move(layer_sizes))),
      hidden_activations_(std::move(hidden_activations)) {
  const int layers = num_layers();
  if (!hidden_activations_.empty() &&
      hidden_activations_.size() != static_cast<std::size_t>(layers - 1)) {
    throw std::invalid_argument("Mlp: one activation per hidden layer");
  }
  layer_offsets_.resize(layers);
  std::size_t offset = 0;
  for (int l = 0; l < layers; ++l) {
    layer_offsets_[l] = offset;
    offset += static_cast<std::size_t>(layer_sizes_[l] + 1) * layer_sizes_[l + 1];
  }
  params_.assign(offset, 0.0);
  grads_.assign(offset, 0.0);
}

void Mlp::init_uniform(Rng& rng) {
  const int layers = num_layers();
  for (int l = 0; l < layers; ++l) {
    const int fan_in = layer_sizes_[l];
    const int fan_out = layer_sizes_[l + 1];
    const double bound = std::sqrt(1.0 / fan_in);
    double* w = params_.data() + layer_offsets_[l];
    for (int i = 0; i < fan_out * fan_in; ++i) w[i] = rng.uniform(-bound, bound);
    double* b = w + static_cast<std::size_t>(fan_out) * fan_in;
    for (int i = 0; i < fan_out; ++i) b[i] = rng.uniform(-bound, bound);
  }
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  ForwardTrace scratch;
  return forward(input, scratch);
}

std::vector<double> Mlp::forward(std::span<const double> input,
                                 ForwardTrace& trace) const {
  if (static_cast<int>(input.size()) != input_dim())
    throw std::invalid_argument("Mlp::forward: input size mismatch");

  const int layers = num_layers();
  trace.layer_inputs.resize(layers);
  trace.pre_activations.resize(layers);

  std::vector<double> x(input.begin(), input.end());
  for (int l = 0; l < layers; ++l) {
    const int in = layer_sizes_[l];
    const int out = layer_sizes_[l + 1];
    const double* base = params_.data() + layer_offsets_[l];
    MapConstMat w(base, out, in);
    MapConstVec b(base + static_cast<std::size_t>(out) * in, out);

    trace.layer_inputs[l] = x;
    std::vector<double> pre(out);
    MapVec pre_map(pre.data(), out);
    pre_map.noalias() = w * MapConstVec(x.data(), in) + b;
    trace.pre_activations[l] = pre;

    const Activation act =
        l + 1 < layers ? hidden_activations_[l] : Activation::kIdentity;
    x.resize(out);
    for (int i = 0; i < out; ++i) x[i] = activate(act, pre[i]);
  }
  trace.valid = true;
  return x;
}

void Mlp::backward(const ForwardTrace& trace,
                   std::span<const double> output_grad) {
  if (!trace.valid)
    throw StateError("Mlp::backward: no forward trace available");
  if (static_cast<int>(output_grad.size()) != output_dim())
    throw std::invalid_argument("Mlp::backward: output gradient size mismatch");

  const int layers = num_layers();
  std::vector<double> g(output_grad.begin(), output_grad.end());
  for (int l = layers - 1; l >= 0; --l) {
    const int in = layer_sizes_[l];
    const int out = layer_sizes_[l + 1];
    const Activation act =
        l + 1 < layers ? hidden_activations_[l] : Activation::kIdentity;

    const auto& pre = trace.pre_activations[l];
    std::vector<double> gpre(out);
    for (int i = 0; i < out; ++i) gpre[i] = g[i] * activate_grad(act, pre[i]);

    const double* base = params_.data() + layer_offsets_[l];
    double* gbase = grads_.data() + layer_offsets_[l];
    MapConstMat w(base, out, in);
    MapMat gw(gbase, out, in);
    MapVec gb(gbase + static_cast<std::size_t>(out) * in, out);

    const auto& x = trace.layer_inputs[l];
    MapConstVec x_map(x.data(), in);
    MapConstVec gpre_map(gpre.data(), out);
    gw.noalias() += gpre_map * x_map.transpose();
    gb.noalias() += gpre_map;

    if (l > 0) {
      std::vector<double> gx(in);
      MapVec gx_map(gx.data(), in);
      gx_map.noalias() = w.transpose() * gpre_map;
      g = std::move(gx);
    }
  }
}

void Mlp::zero_grad() { grads_.assign(grads_.size(), 0.0); }

void Mlp::scale_grad(double factor) {
  for (double& g : grads_) g *= factor;
}

}  // namespace flowcritic::nn
