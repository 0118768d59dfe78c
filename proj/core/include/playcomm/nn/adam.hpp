#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "playcomm/tensor.hpp"

namespace playcomm::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const {
    if (!(learning_rate > 0.0)) {
      throw std::invalid_argument("AdamConfig: learning_rate must be > 0");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
      throw std::invalid_argument("AdamConfig: betas must lie in [0,1)");
    }
    if (!(epsilon > 0.0)) {
      throw std::invalid_argument("AdamConfig: epsilon must be > 0");
    }
  }
};

// Bias-corrected update of a single parameter tensor. step is the 1-based
// count of updates applied so far including this one.
template <typename T>
void adam_update(Tensor<T>& param, const Tensor<T>& grad, Tensor<T>& m,
                 Tensor<T>& v, std::uint64_t step, const AdamConfig& cfg) {
  if (!param.same_shape(grad) || !param.same_shape(m) || !param.same_shape(v)) {
    throw std::invalid_argument(
        "adam_update: shape mismatch between param " + param.shape_string() +
        ", grad " + grad.shape_string() + ", moments " + m.shape_string());
  }
  if (step == 0) throw std::invalid_argument("adam_update: step must be >= 1");
  const double b1 = cfg.beta1, b2 = cfg.beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(step));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(step));
  for (std::size_t i = 0; i < param.numel(); ++i) {
    const double g = static_cast<double>(grad[i]);
    const double mi = b1 * static_cast<double>(m[i]) + (1.0 - b1) * g;
    const double vi = b2 * static_cast<double>(v[i]) + (1.0 - b2) * g * g;
    m[i] = static_cast<T>(mi);
    v[i] = static_cast<T>(vi);
    const double m_hat = mi / corr1;
    const double v_hat = vi / corr2;
    param[i] = static_cast<T>(static_cast<double>(param[i]) -
                              cfg.learning_rate * m_hat /
                                  (std::sqrt(v_hat) + cfg.epsilon));
  }
}

// Optimizer state across a whole parameter list. Moment tensors shape-match
// their parameters; step_count increases by one per applied step.
template <typename T>
class AdamState {
 public:
  AdamState() = default;

  AdamState(AdamConfig cfg, const std::vector<std::vector<std::size_t>>& shapes)
      : cfg_(cfg) {
    cfg_.validate();
    for (const auto& s : shapes) {
      first_.emplace_back(s);
      second_.emplace_back(s);
    }
  }

  const AdamConfig& config() const { return cfg_; }
  std::uint64_t step_count() const { return step_; }
  std::size_t size() const { return first_.size(); }
  std::vector<Tensor<T>>& first_moments() { return first_; }
  std::vector<Tensor<T>>& second_moments() { return second_; }
  const std::vector<Tensor<T>>& first_moments() const { return first_; }
  const std::vector<Tensor<T>>& second_moments() const { return second_; }

  void restore(std::uint64_t step, std::vector<Tensor<T>> first,
               std::vector<Tensor<T>> second) {
    step_ = step;
    first_ = std::move(first);
    second_ = std::move(second);
  }

  // Applies one step over parallel param/grad lists. `names` is used for
  // diagnostics when a non-finite gradient shows up.
  void step(const std::vector<Tensor<T>*>& params,
            const std::vector<const Tensor<T>*>& grads,
            const std::vector<std::string>& names) {
    if (params.size() != first_.size() || grads.size() != first_.size()) {
      throw std::invalid_argument("AdamState::step: parameter count mismatch");
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
      if (!grads[i]->all_finite()) {
        throw std::runtime_error("adam: non-finite gradient in " +
                                 (i < names.size() ? names[i]
                                                   : "param " + std::to_string(i)));
      }
    }
    ++step_;
    for (std::size_t i = 0; i < params.size(); ++i) {
      adam_update(*params[i], *grads[i], first_[i], second_[i], step_, cfg_);
    }
  }

 private:
  AdamConfig cfg_;
  std::uint64_t step_ = 0;
  std::vector<Tensor<T>> first_;
  std::vector<Tensor<T>> second_;
};

}  // namespace playcomm::nn
