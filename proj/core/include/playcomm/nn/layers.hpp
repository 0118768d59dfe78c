#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "playcomm/nn/ops.hpp"
#include "playcomm/rng.hpp"
#include "playcomm/tensor.hpp"

namespace playcomm::nn {

enum class LayerKind { conv2d, maxpool2d, dense, dropout, flatten, leaky_relu };

// Declarative layer description. Only the fields relevant to `kind` are
// meaningful; the factories validate them.
struct LayerSpec {
  LayerKind kind = LayerKind::flatten;
  std::size_t filters = 0;
  std::size_t filter_size = 0;
  std::size_t stride = 1;
  Padding padding = Padding::same;
  std::size_t pool = 0;
  std::size_t units = 0;
  double keep_prob = 1.0;
  double negative_slope = 0.0;

  static LayerSpec conv2d(std::size_t filters, std::size_t filter_size,
                          std::size_t stride, Padding padding) {
    if (filters == 0 || filter_size == 0 || stride == 0) {
      throw std::invalid_argument("LayerSpec: conv2d sizes must be strictly positive");
    }
    LayerSpec s;
    s.kind = LayerKind::conv2d;
    s.filters = filters;
    s.filter_size = filter_size;
    s.stride = stride;
    s.padding = padding;
    return s;
  }

  static LayerSpec maxpool2d(std::size_t pool, std::size_t stride) {
    if (pool == 0 || stride == 0) {
      throw std::invalid_argument("LayerSpec: maxpool2d sizes must be strictly positive");
    }
    LayerSpec s;
    s.kind = LayerKind::maxpool2d;
    s.pool = pool;
    s.stride = stride;
    return s;
  }

  static LayerSpec dense(std::size_t units) {
    if (units == 0) {
      throw std::invalid_argument("LayerSpec: dense units must be strictly positive");
    }
    LayerSpec s;
    s.kind = LayerKind::dense;
    s.units = units;
    return s;
  }

  static LayerSpec dropout(double keep_prob) {
    check_keep_prob(keep_prob);
    LayerSpec s;
    s.kind = LayerKind::dropout;
    s.keep_prob = keep_prob;
    return s;
  }

  static LayerSpec flatten() {
    LayerSpec s;
    s.kind = LayerKind::flatten;
    return s;
  }

  static LayerSpec leaky_relu(double negative_slope) {
    check_negative_slope(negative_slope);
    LayerSpec s;
    s.kind = LayerKind::leaky_relu;
    s.negative_slope = negative_slope;
    return s;
  }
};

template <typename T>
struct ParamRef {
  Tensor<T>* value;
  Tensor<T>* grad;
  std::string name;
};

template <typename T>
class Conv2dLayer {
 public:
  Conv2dLayer(std::string name, Tensor<T> weights, Tensor<T> biases,
              std::size_t stride, Padding padding)
      : name_(std::move(name)),
        weights_(std::move(weights)),
        biases_(std::move(biases)),
        grad_weights_(weights_.shape()),
        grad_biases_(biases_.shape()),
        stride_(stride),
        padding_(padding) {}

  Tensor<T> forward(const Tensor<T>& x, Mode, Rng&) {
    cached_input_ = x;
    return conv2d_forward(x, weights_, biases_, stride_, padding_);
  }

  Tensor<T> backward(const Tensor<T>& grad_out) {
    auto grads = conv2d_backward(grad_out, cached_input_, weights_, stride_, padding_);
    grad_weights_ = std::move(grads.weights);
    grad_biases_ = std::move(grads.biases);
    return std::move(grads.input);
  }

  std::vector<ParamRef<T>> params() {
    return {{&weights_, &grad_weights_, name_ + ".weights"},
            {&biases_, &grad_biases_, name_ + ".biases"}};
  }

  const std::string& name() const { return name_; }
  Tensor<T>& weights() { return weights_; }
  Tensor<T>& biases() { return biases_; }

 private:
  std::string name_;
  Tensor<T> weights_, biases_;
  Tensor<T> grad_weights_, grad_biases_;
  std::size_t stride_;
  Padding padding_;
  Tensor<T> cached_input_;
};

template <typename T>
class MaxPoolLayer {
 public:
  MaxPoolLayer(std::string name, std::size_t pool, std::size_t stride)
      : name_(std::move(name)), pool_(pool), stride_(stride) {}

  Tensor<T> forward(const Tensor<T>& x, Mode, Rng&) {
    cached_ = maxpool2d_forward(x, pool_, stride_);
    return cached_.output;
  }

  Tensor<T> backward(const Tensor<T>& grad_out) {
    return maxpool2d_backward(grad_out, cached_);
  }

  std::vector<ParamRef<T>> params() { return {}; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::size_t pool_, stride_;
  MaxPoolResult<T> cached_;
};

template <typename T>
class DenseLayer {
 public:
  DenseLayer(std::string name, Tensor<T> weights, Tensor<T> biases)
      : name_(std::move(name)),
        weights_(std::move(weights)),
        biases_(std::move(biases)),
        grad_weights_(weights_.shape()),
        grad_biases_(biases_.shape()) {}

  Tensor<T> forward(const Tensor<T>& x, Mode, Rng&) {
    cached_input_ = x;
    return dense_forward(x, weights_, biases_);
  }

  Tensor<T> backward(const Tensor<T>& grad_out) {
    auto grads = dense_backward(grad_out, cached_input_, weights_);
    grad_weights_ = std::move(grads.weights);
    grad_biases_ = std::move(grads.biases);
    return std::move(grads.input);
  }

  std::vector<ParamRef<T>> params() {
    return {{&weights_, &grad_weights_, name_ + ".weights"},
            {&biases_, &grad_biases_, name_ + ".biases"}};
  }

  const std::string& name() const { return name_; }
  Tensor<T>& weights() { return weights_; }
  Tensor<T>& biases() { return biases_; }

 private:
  std::string name_;
  Tensor<T> weights_, biases_;
  Tensor<T> grad_weights_, grad_biases_;
  Tensor<T> cached_input_;
};

template <typename T>
class DropoutLayer {
 public:
  DropoutLayer(std::string name, double keep_prob)
      : name_(std::move(name)), keep_prob_(keep_prob) {}

  Tensor<T> forward(const Tensor<T>& x, Mode mode, Rng& rng) {
    auto res = dropout_forward(x, keep_prob_, mode, rng);
    cached_mask_ = std::move(res.mask);
    return std::move(res.output);
  }

  Tensor<T> backward(const Tensor<T>& grad_out) {
    return dropout_backward(grad_out, cached_mask_, keep_prob_);
  }

  std::vector<ParamRef<T>> params() { return {}; }
  const std::string& name() const { return name_; }
  double keep_prob() const { return keep_prob_; }

 private:
  std::string name_;
  double keep_prob_;
  Tensor<T> cached_mask_;
};

template <typename T>
class FlattenLayer {
 public:
  explicit FlattenLayer(std::string name) : name_(std::move(name)) {}

  Tensor<T> forward(const Tensor<T>& x, Mode, Rng&) {
    cached_shape_ = x.shape();
    return x.reshaped({x.dim(0), x.numel() / x.dim(0)});
  }

  Tensor<T> backward(const Tensor<T>& grad_out) {
    return grad_out.reshaped(cached_shape_);
  }

  std::vector<ParamRef<T>> params() { return {}; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::vector<std::size_t> cached_shape_;
};

template <typename T>
class LeakyReluLayer {
 public:
  LeakyReluLayer(std::string name, double negative_slope)
      : name_(std::move(name)), slope_(negative_slope) {}

  Tensor<T> forward(const Tensor<T>& x, Mode, Rng&) {
    cached_input_ = x;
    return leaky_relu_forward(x, slope_);
  }

  Tensor<T> backward(const Tensor<T>& grad_out) {
    return leaky_relu_backward(grad_out, cached_input_, slope_);
  }

  std::vector<ParamRef<T>> params() { return {}; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  double slope_;
  Tensor<T> cached_input_;
};

template <typename T>
using Layer = std::variant<Conv2dLayer<T>, MaxPoolLayer<T>, DenseLayer<T>,
                           DropoutLayer<T>, FlattenLayer<T>, LeakyReluLayer<T>>;

}  // namespace playcomm::nn
