#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "wmpg/random.hpp"

namespace wmpg {

enum class Activation { ReLU, Tanh, Identity, Softmax };

std::string_view to_string(Activation activation);
Activation activation_from_string(std::string_view name);

struct LayerSpec {
  std::size_t input_width = 1;
  std::size_t output_width = 1;
  Activation activation = Activation::Identity;

  std::size_t parameter_count() const { return (input_width + 1) * output_width; }
  bool operator==(const LayerSpec&) const = default;
};

/**
 * Dense feedforward network over a flat parameter vector.
 *
 * Parameters are laid out layer by layer; each layer stores its weight matrix
 * row-major (output_width x input_width) followed by the bias vector.
 * forward() caches the activations of the most recent call so backward() can
 * run without re-evaluating the net. predict() is the cache-free const path
 * used wherever the network must stay read-only (imagination, evaluation).
 */
class Network {
 public:
  Network() = default;
  explicit Network(std::vector<LayerSpec> layers);

  /// Builds an MLP: `hidden` widths with `hidden_activation`, then an output layer.
  static Network mlp(std::size_t input_width, std::span<const std::size_t> hidden,
                     std::size_t output_width, Activation hidden_activation,
                     Activation output_activation);

  /// Uniform fan-in scaled initialization U(-l, l), l = sqrt(3 gain / fan_in) with gain 2 for ReLU
  /// layers and 1 otherwise; biases zero. The output layer's limit is multiplied by `output_scale`.
  void initialize(Rng& rng, double output_scale = 1.0);

  std::span<const double> forward(std::span<const double> input);
  std::vector<double> predict(std::span<const double> input) const;

  /// Gradient of <output_gradient, output> with respect to the parameters at the cached input.
  std::vector<double> backward(std::span<const double> output_gradient) const;
  /// As backward(), adding `scale` times the gradient into `accumulator`.
  void backward_accumulate(std::span<const double> output_gradient, std::span<double> accumulator,
                           double scale = 1.0) const;

  const std::vector<LayerSpec>& layers() const { return layers_; }
  std::size_t input_width() const { return layers_.front().input_width; }
  std::size_t output_width() const { return layers_.back().output_width; }
  std::size_t parameter_count() const { return parameters_.size(); }

  std::span<const double> parameters() const { return parameters_; }
  std::span<double> parameters() { return parameters_; }
  void set_parameters(std::span<const double> values);

  bool has_forward_cache() const { return cached_; }

 private:
  void run_forward(std::span<const double> input, std::vector<std::vector<double>>& pre,
                   std::vector<std::vector<double>>& post) const;

  std::vector<LayerSpec> layers_;
  std::vector<std::size_t> offsets_;
  std::vector<double> parameters_;

  // Cache: pre_[l] holds layer l's pre-activation, post_[l] its input (post_[0] is the net input).
  std::vector<std::vector<double>> pre_;
  std::vector<std::vector<double>> post_;
  bool cached_ = false;
};

}  // namespace wmpg
