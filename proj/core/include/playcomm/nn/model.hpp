#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "playcomm/hash.hpp"
#include "playcomm/nn/layers.hpp"
#include "playcomm/rng.hpp"
#include "playcomm/tensor.hpp"

namespace playcomm::nn {

// The frame-to-embedding network: three conv blocks (32, 64, 64 filters of
// size 3) with max pooling after the first and third, then fc1024, dropout
// and the fc output whose width equals the sentence-embedding dimension.
// Hidden layers use leaky ReLU; the output layer is linear.
struct ArchitectureConfig {
  std::size_t input_height = 64;
  std::size_t input_width = 64;
  std::size_t input_channels = 3;
  std::vector<std::size_t> conv_filters{32, 64, 64};
  std::size_t filter_size = 3;
  std::size_t fc1_units = 1024;
  double dropout_keep = 0.9;
  std::size_t output_dim = 512;
  double negative_slope = 0.01;

  std::size_t pool_size = 2;
  std::size_t pool_stride = 2;

  void validate() const {
    if (input_height == 0 || input_width == 0 || input_channels == 0) {
      throw std::invalid_argument("ArchitectureConfig: input dimensions must be positive");
    }
    if (conv_filters.size() != 3) {
      throw std::invalid_argument("ArchitectureConfig: expected three conv stages");
    }
    for (std::size_t f : conv_filters) {
      if (f == 0) throw std::invalid_argument("ArchitectureConfig: zero conv filters");
    }
    if (filter_size == 0 || fc1_units == 0 || output_dim == 0) {
      throw std::invalid_argument("ArchitectureConfig: layer sizes must be positive");
    }
    check_keep_prob(dropout_keep);
    check_negative_slope(negative_slope);
    // Two pools; both must leave a nonzero spatial extent.
    if (pooled(pooled(input_height)) == 0 || pooled(pooled(input_width)) == 0) {
      throw std::invalid_argument(
          "ArchitectureConfig: input " + std::to_string(input_height) + "x" +
          std::to_string(input_width) + " too small for two " +
          std::to_string(pool_size) + "x" + std::to_string(pool_size) + " pools");
    }
  }

  std::size_t pooled(std::size_t extent) const {
    if (extent < pool_size) return 0;
    return (extent - pool_size) / pool_stride + 1;
  }

  // Spatial extent is preserved by the same-padded stride-1 convs, so only
  // the two pools shrink it.
  std::size_t flatten_height() const { return pooled(pooled(input_height)); }
  std::size_t flatten_width() const { return pooled(pooled(input_width)); }
  std::size_t flatten_size() const {
    return flatten_height() * flatten_width() * conv_filters[2];
  }

  std::vector<LayerSpec> layer_stack() const {
    validate();
    std::vector<LayerSpec> stack;
    stack.push_back(LayerSpec::conv2d(conv_filters[0], filter_size, 1, Padding::same));
    stack.push_back(LayerSpec::leaky_relu(negative_slope));
    stack.push_back(LayerSpec::maxpool2d(pool_size, pool_stride));
    stack.push_back(LayerSpec::conv2d(conv_filters[1], filter_size, 1, Padding::same));
    stack.push_back(LayerSpec::leaky_relu(negative_slope));
    stack.push_back(LayerSpec::conv2d(conv_filters[2], filter_size, 1, Padding::same));
    stack.push_back(LayerSpec::leaky_relu(negative_slope));
    stack.push_back(LayerSpec::maxpool2d(pool_size, pool_stride));
    stack.push_back(LayerSpec::flatten());
    stack.push_back(LayerSpec::dense(fc1_units));
    stack.push_back(LayerSpec::leaky_relu(negative_slope));
    stack.push_back(LayerSpec::dropout(dropout_keep));
    stack.push_back(LayerSpec::dense(output_dim));
    return stack;
  }

  friend bool operator==(const ArchitectureConfig&, const ArchitectureConfig&) = default;
};

template <typename T>
class Model {
 public:
  Model(ArchitectureConfig config, std::uint64_t seed)
      : config_(std::move(config)) {
    config_.validate();
    Rng init_rng(derive_seed(seed, 0x11217));
    build(init_rng);
  }

  const ArchitectureConfig& config() const { return config_; }
  std::vector<Layer<T>>& layers() { return layers_; }
  const std::vector<Layer<T>>& layers() const { return layers_; }

  // One pass over the whole stack. rng feeds dropout in train mode.
  Tensor<T> forward(const Tensor<T>& frames, Mode mode, Rng& rng) {
    check_input(frames);
    Tensor<T> x = frames;
    for (auto& layer : layers_) {
      x = std::visit([&](auto& l) { return l.forward(x, mode, rng); }, layer);
    }
    return x;
  }

  // Propagates the loss gradient; each layer leaves its parameter gradients
  // behind for the optimizer.
  Tensor<T> backward(const Tensor<T>& grad_out) {
    Tensor<T> g = grad_out;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
      g = std::visit([&](auto& l) { return l.backward(g); }, *it);
    }
    return g;
  }

  // Inference: dropout is the identity, inputs must be [N,H,W,C] in [0,1].
  Tensor<T> predict(const Tensor<T>& frames) {
    check_input(frames);
    for (std::size_t i = 0; i < frames.numel(); ++i) {
      const double v = static_cast<double>(frames[i]);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("predict: pixel value " + std::to_string(v) +
                                    " outside [0,1]");
      }
    }
    Rng unused(0);
    Tensor<T> x = frames;
    for (auto& layer : layers_) {
      x = std::visit([&](auto& l) { return l.forward(x, Mode::infer, unused); }, layer);
    }
    return x;
  }

  std::vector<ParamRef<T>> params() {
    std::vector<ParamRef<T>> out;
    for (auto& layer : layers_) {
      auto refs = std::visit([](auto& l) { return l.params(); }, layer);
      out.insert(out.end(), refs.begin(), refs.end());
    }
    return out;
  }

  std::vector<std::vector<std::size_t>> param_shapes() {
    std::vector<std::vector<std::size_t>> shapes;
    for (const auto& ref : params()) shapes.push_back(ref.value->shape());
    return shapes;
  }

 private:
  void check_input(const Tensor<T>& frames) const {
    if (frames.rank() != 4 || frames.dim(1) != config_.input_height ||
        frames.dim(2) != config_.input_width ||
        frames.dim(3) != config_.input_channels) {
      throw std::invalid_argument(
          "model: frames " + frames.shape_string() + " do not match input [N," +
          std::to_string(config_.input_height) + "," +
          std::to_string(config_.input_width) + "," +
          std::to_string(config_.input_channels) + "]");
    }
  }

  // He-style init scaled for the leaky slope; biases start at zero.
  Tensor<T> init_weights(std::vector<std::size_t> shape, std::size_t fan_in,
                         Rng& rng) const {
    Tensor<T> w(std::move(shape));
    const double stddev =
        std::sqrt(2.0 / ((1.0 + config_.negative_slope * config_.negative_slope) *
                         static_cast<double>(fan_in)));
    for (std::size_t i = 0; i < w.numel(); ++i) {
      w[i] = static_cast<T>(rng.normal() * stddev);
    }
    return w;
  }

  void build(Rng& rng) {
    layers_.clear();
    std::size_t conv_index = 0, dense_index = 0, channels = config_.input_channels;
    std::size_t flat = 0;
    for (const LayerSpec& spec : config_.layer_stack()) {
      switch (spec.kind) {
        case LayerKind::conv2d: {
          const std::size_t k = spec.filter_size;
          const std::string name = "conv" + std::to_string(++conv_index);
          Tensor<T> w = init_weights({k, k, channels, spec.filters},
                                     k * k * channels, rng);
          layers_.emplace_back(Conv2dLayer<T>(name, std::move(w),
                                              Tensor<T>({spec.filters}),
                                              spec.stride, spec.padding));
          channels = spec.filters;
          break;
        }
        case LayerKind::maxpool2d:
          layers_.emplace_back(MaxPoolLayer<T>("pool", spec.pool, spec.stride));
          break;
        case LayerKind::flatten:
          layers_.emplace_back(FlattenLayer<T>("flatten"));
          flat = config_.flatten_size();
          break;
        case LayerKind::dense: {
          const std::size_t in = dense_index == 0 ? flat : config_.fc1_units;
          const std::string name = "fc" + std::to_string(spec.units);
          ++dense_index;
          Tensor<T> w = init_weights({in, spec.units}, in, rng);
          layers_.emplace_back(DenseLayer<T>(name, std::move(w),
                                             Tensor<T>({spec.units})));
          break;
        }
        case LayerKind::dropout:
          layers_.emplace_back(DropoutLayer<T>("dropout", spec.keep_prob));
          break;
        case LayerKind::leaky_relu:
          layers_.emplace_back(LeakyReluLayer<T>("leaky_relu", spec.negative_slope));
          break;
      }
    }
  }

  ArchitectureConfig config_;
  std::vector<Layer<T>> layers_;
};

}  // namespace playcomm::nn
