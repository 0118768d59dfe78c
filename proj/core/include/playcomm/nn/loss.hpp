#pragma once

#include <stdexcept>

#include "playcomm/tensor.hpp"

namespace playcomm::nn {

template <typename T>
struct MseResult {
  double loss = 0.0;
  Tensor<T> grad;
};

// loss = mean over all elements of (pred - target)^2,
// grad = 2 * (pred - target) / numel. The sum is accumulated in double.
template <typename T>
MseResult<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& target) {
  if (!pred.same_shape(target)) {
    throw std::invalid_argument("mse_loss: pred shape " + pred.shape_string() +
                                " != target shape " + target.shape_string());
  }
  MseResult<T> res;
  res.grad = Tensor<T>(pred.shape());
  const double inv_n = 1.0 / static_cast<double>(pred.numel());
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.numel(); ++i) {
    const double d = static_cast<double>(pred[i]) - static_cast<double>(target[i]);
    acc += d * d;
    res.grad[i] = static_cast<T>(2.0 * d * inv_n);
  }
  res.loss = acc * inv_n;
  return res;
}

}  // namespace playcomm::nn
