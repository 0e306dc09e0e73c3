#include "wmpg/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wmpg/errors.hpp"

namespace wmpg {

std::string_view to_string(Activation activation) {
  switch (activation) {
    case Activation::ReLU: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
    case Activation::Softmax: return "softmax";
  }
  return "unknown";
}

Activation activation_from_string(std::string_view name) {
  if (name == "relu") return Activation::ReLU;
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity") return Activation::Identity;
  if (name == "softmax") return Activation::Softmax;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

namespace {

void apply_activation(Activation act, std::span<const double> pre, std::span<double> out) {
  switch (act) {
    case Activation::ReLU:
      for (std::size_t i = 0; i < pre.size(); ++i) out[i] = pre[i] > 0.0 ? pre[i] : 0.0;
      break;
    case Activation::Tanh:
      for (std::size_t i = 0; i < pre.size(); ++i) out[i] = std::tanh(pre[i]);
      break;
    case Activation::Identity:
      std::copy(pre.begin(), pre.end(), out.begin());
      break;
    case Activation::Softmax: {
      const double peak = *std::max_element(pre.begin(), pre.end());
      double total = 0.0;
      for (std::size_t i = 0; i < pre.size(); ++i) {
        out[i] = std::exp(pre[i] - peak);
        total += out[i];
      }
      for (double& v : out) v /= total;
      break;
    }
  }
}

// Overwrites `grad` (gradient wrt activation output) with the gradient wrt the pre-activation.
void activation_backward(Activation act, std::span<const double> pre, std::span<const double> out,
                         std::span<double> grad) {
  switch (act) {
    case Activation::ReLU:
      for (std::size_t i = 0; i < grad.size(); ++i)
        if (pre[i] <= 0.0) grad[i] = 0.0;
      break;
    case Activation::Tanh:
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= 1.0 - out[i] * out[i];
      break;
    case Activation::Identity:
      break;
    case Activation::Softmax: {
      double dot = 0.0;
      for (std::size_t i = 0; i < grad.size(); ++i) dot += grad[i] * out[i];
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = out[i] * (grad[i] - dot);
      break;
    }
  }
}

}  // namespace

Network::Network(std::vector<LayerSpec> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ConfigError("network needs at least one layer");
  std::size_t total = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& spec = layers_[l];
    if (spec.input_width == 0 || spec.output_width == 0)
      throw ConfigError("layer widths must be >= 1");
    if (l > 0 && spec.input_width != layers_[l - 1].output_width)
      throw ConfigError("layer " + std::to_string(l) + " input width does not match previous output");
    if (spec.activation == Activation::Softmax && l + 1 != layers_.size())
      throw ConfigError("softmax is only allowed on the final layer");
    offsets_.push_back(total);
    total += spec.parameter_count();
  }
  parameters_.assign(total, 0.0);
  pre_.resize(layers_.size());
  post_.resize(layers_.size() + 1);
}

Network Network::mlp(std::size_t input_width, std::span<const std::size_t> hidden,
                     std::size_t output_width, Activation hidden_activation,
                     Activation output_activation) {
  std::vector<LayerSpec> layers;
  std::size_t width = input_width;
  for (std::size_t h : hidden) {
    layers.push_back({width, h, hidden_activation});
    width = h;
  }
  layers.push_back({width, output_width, output_activation});
  return Network(std::move(layers));
}

void Network::initialize(Rng& rng, double output_scale) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& spec = layers_[l];
    // Fan-in scaling with gain 2 for ReLU layers and 1 otherwise.
    const double gain = spec.activation == Activation::ReLU ? 2.0 : 1.0;
    double limit = std::sqrt(3.0 * gain / static_cast<double>(spec.input_width));
    if (l + 1 == layers_.size()) limit *= output_scale;
    std::uniform_real_distribution<double> dist(-limit, limit);
    double* w = parameters_.data() + offsets_[l];
    for (std::size_t i = 0; i < spec.input_width * spec.output_width; ++i) w[i] = dist(rng);
    std::fill_n(w + spec.input_width * spec.output_width, spec.output_width, 0.0);
  }
  cached_ = false;
}

void Network::run_forward(std::span<const double> input, std::vector<std::vector<double>>& pre,
                          std::vector<std::vector<double>>& post) const {
  if (layers_.empty()) throw UsageError("forward on an empty network");
  if (input.size() != layers_.front().input_width)
    throw ConfigError("input length " + std::to_string(input.size()) + " != network input width " +
                      std::to_string(layers_.front().input_width));
  post[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& spec = layers_[l];
    const double* w = parameters_.data() + offsets_[l];
    const double* b = w + spec.input_width * spec.output_width;
    const std::vector<double>& x = post[l];
    std::vector<double>& z = pre[l];
    z.resize(spec.output_width);
    for (std::size_t o = 0; o < spec.output_width; ++o) {
      const double* row = w + o * spec.input_width;
      double acc = b[o];
      for (std::size_t i = 0; i < spec.input_width; ++i) acc += row[i] * x[i];
      z[o] = acc;
    }
    post[l + 1].resize(spec.output_width);
    apply_activation(spec.activation, z, post[l + 1]);
  }
}

std::span<const double> Network::forward(std::span<const double> input) {
  run_forward(input, pre_, post_);
  cached_ = true;
  return post_.back();
}

std::vector<double> Network::predict(std::span<const double> input) const {
  std::vector<std::vector<double>> pre(layers_.size());
  std::vector<std::vector<double>> post(layers_.size() + 1);
  run_forward(input, pre, post);
  return std::move(post.back());
}

std::vector<double> Network::backward(std::span<const double> output_gradient) const {
  std::vector<double> grad(parameters_.size(), 0.0);
  backward_accumulate(output_gradient, grad);
  return grad;
}

void Network::backward_accumulate(std::span<const double> output_gradient,
                                  std::span<double> accumulator, double scale) const {
  if (!cached_) throw UsageError("backward called before forward");
  if (output_gradient.size() != output_width())
    throw ConfigError("output gradient length does not match network output width");
  if (accumulator.size() != parameters_.size())
    throw ConfigError("gradient accumulator length does not match parameter count");

  std::vector<double> delta(output_gradient.begin(), output_gradient.end());
  std::vector<double> upstream;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const auto& spec = layers_[l];
    activation_backward(spec.activation, pre_[l], post_[l + 1], delta);
    const double* w = parameters_.data() + offsets_[l];
    double* gw = accumulator.data() + offsets_[l];
    double* gb = gw + spec.input_width * spec.output_width;
    const std::vector<double>& x = post_[l];
    const bool need_upstream = l > 0;
    if (need_upstream) upstream.assign(spec.input_width, 0.0);
    for (std::size_t o = 0; o < spec.output_width; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double sd = scale * d;
      double* grow = gw + o * spec.input_width;
      for (std::size_t i = 0; i < spec.input_width; ++i) grow[i] += sd * x[i];
      gb[o] += sd;
      if (need_upstream) {
        const double* row = w + o * spec.input_width;
        for (std::size_t i = 0; i < spec.input_width; ++i) upstream[i] += row[i] * d;
      }
    }
    if (need_upstream) delta.swap(upstream);
  }
}

void Network::set_parameters(std::span<const double> values) {
  if (values.size() != parameters_.size())
    throw ConfigError("parameter vector length does not match network");
  std::copy(values.begin(), values.end(), parameters_.begin());
  cached_ = false;
}

}  // namespace wmpg
