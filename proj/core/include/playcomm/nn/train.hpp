#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "playcomm/hash.hpp"
#include "playcomm/nn/adam.hpp"
#include "playcomm/nn/loss.hpp"
#include "playcomm/nn/model.hpp"

namespace playcomm::nn {

struct TrainConfig {
  std::size_t batch_size = 32;
  std::size_t max_epochs = 20;
  std::size_t convergence_window = 3;
  double convergence_rel_tol = 1e-3;
  std::uint64_t seed = 0;
  AdamConfig adam{};

  void validate() const {
    if (batch_size == 0 || max_epochs == 0 || convergence_window == 0) {
      throw std::invalid_argument("TrainConfig: batch_size, max_epochs and "
                                  "convergence_window must be positive");
    }
    if (!(convergence_rel_tol > 0.0)) {
      throw std::invalid_argument("TrainConfig: convergence_rel_tol must be positive");
    }
    adam.validate();
  }
};

struct TrainResult {
  std::vector<double> loss_history;  // mean loss per epoch
  std::size_t epochs_run = 0;
  double final_loss = 0.0;
  bool converged_early = false;
};

namespace detail {

template <typename T>
Tensor<T> gather_rows4(const Tensor<T>& src, const std::vector<std::size_t>& idx,
                       std::size_t begin, std::size_t count) {
  const std::size_t row = src.numel() / src.dim(0);
  Tensor<T> out({count, src.dim(1), src.dim(2), src.dim(3)});
  for (std::size_t i = 0; i < count; ++i) {
    const T* s = src.data() + idx[begin + i] * row;
    std::copy(s, s + row, out.data() + i * row);
  }
  return out;
}

template <typename T>
Tensor<T> gather_rows2(const Tensor<T>& src, const std::vector<std::size_t>& idx,
                       std::size_t begin, std::size_t count) {
  const std::size_t row = src.dim(1);
  Tensor<T> out({count, row});
  for (std::size_t i = 0; i < count; ++i) {
    const T* s = src.data() + idx[begin + i] * row;
    std::copy(s, s + row, out.data() + i * row);
  }
  return out;
}

}  // namespace detail

// Minibatch training with Adam. Shuffles per epoch with a seeded generator,
// stops at max_epochs or once the relative improvement of the mean epoch
// loss across convergence_window epochs falls below convergence_rel_tol.
// Bit-deterministic given (seed, data, config).
template <typename T>
TrainResult train(Model<T>& model, const Tensor<T>& frames,
                  const Tensor<T>& targets, const TrainConfig& cfg,
                  const std::function<void(std::size_t, double)>& on_epoch = {}) {
  cfg.validate();
  if (frames.rank() != 4 || targets.rank() != 2) {
    throw std::invalid_argument("train: expected frames [N,H,W,C] and targets [N,D]");
  }
  if (frames.dim(0) != targets.dim(0)) {
    throw std::invalid_argument("train: frame count " + std::to_string(frames.dim(0)) +
                                " != target count " + std::to_string(targets.dim(0)));
  }
  const std::size_t n = frames.dim(0);

  Rng shuffle_rng(derive_seed(cfg.seed, 0x5481));
  Rng dropout_rng(derive_seed(cfg.seed, 0xd309));

  auto param_refs = model.params();
  std::vector<Tensor<T>*> params;
  std::vector<const Tensor<T>*> grads;
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> shapes;
  for (auto& r : param_refs) {
    params.push_back(r.value);
    grads.push_back(r.grad);
    names.push_back(r.name);
    shapes.push_back(r.value->shape());
  }
  AdamState<T> adam(cfg.adam, shapes);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < n; begin += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, n - begin);
      Tensor<T> bx = detail::gather_rows4(frames, order, begin, count);
      Tensor<T> by = detail::gather_rows2(targets, order, begin, count);

      Tensor<T> pred = model.forward(bx, Mode::train, dropout_rng);
      MseResult<T> loss = mse_loss(pred, by);
      if (!std::isfinite(loss.loss)) {
        throw std::runtime_error("train: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(begin / cfg.batch_size));
      }
      epoch_loss += loss.loss * static_cast<double>(count);
      model.backward(loss.grad);
      adam.step(params, grads, names);
    }
    epoch_loss /= static_cast<double>(n);
    result.loss_history.push_back(epoch_loss);
    result.epochs_run = epoch;
    result.final_loss = epoch_loss;
    if (on_epoch) on_epoch(epoch, epoch_loss);

    if (epoch >= cfg.convergence_window) {
      const double old = result.loss_history[epoch - cfg.convergence_window];
      const double improvement =
          (old - epoch_loss) / std::max(std::abs(old), 1e-12);
      if (improvement < cfg.convergence_rel_tol) {
        result.converged_early = true;
        break;
      }
    }
  }
  return result;
}

}  // namespace playcomm::nn
