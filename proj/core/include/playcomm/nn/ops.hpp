#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "playcomm/rng.hpp"
#include "playcomm/tensor.hpp"

namespace playcomm::nn {

enum class Padding { same, valid };
enum class Mode { train, infer };

// C[M,N] += A[M,K] * B[K,N], row-major. The ikj order keeps the inner loop
// contiguous in both B and C so the compiler can vectorize it.
template <typename T>
void matmul_accumulate(const T* a, const T* b, T* c, std::size_t m,
                       std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const T* arow = a + i * k;
    T* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = arow[p];
      if (av == T{}) continue;
      const T* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) {
        crow[j] += av * brow[j];
      }
    }
  }
}

// GW[K,N] += A^T[K,M] * B[M,N] with A stored [M,K].
template <typename T>
void matmul_at_b_accumulate(const T* a, const T* b, T* gw, std::size_t m,
                            std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const T* arow = a + i * k;
    const T* brow = b + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = arow[p];
      if (av == T{}) continue;
      T* grow = gw + p * n;
      for (std::size_t j = 0; j < n; ++j) {
        grow[j] += av * brow[j];
      }
    }
  }
}

struct ConvGeometry {
  std::size_t out_h = 0, out_w = 0;
  std::size_t pad_top = 0, pad_left = 0;
};

inline ConvGeometry conv_geometry(std::size_t h, std::size_t w, std::size_t kh,
                                  std::size_t kw, std::size_t stride,
                                  Padding padding) {
  if (stride == 0) throw std::invalid_argument("conv2d: stride must be >= 1");
  ConvGeometry g;
  if (padding == Padding::valid) {
    if (kh > h || kw > w) {
      throw std::invalid_argument(
          "conv2d: filter " + std::to_string(kh) + "x" + std::to_string(kw) +
          " exceeds input " + std::to_string(h) + "x" + std::to_string(w) +
          " with valid padding");
    }
    g.out_h = (h - kh) / stride + 1;
    g.out_w = (w - kw) / stride + 1;
  } else {
    g.out_h = (h + stride - 1) / stride;
    g.out_w = (w + stride - 1) / stride;
    const std::size_t need_h =
        (g.out_h - 1) * stride + kh > h ? (g.out_h - 1) * stride + kh - h : 0;
    const std::size_t need_w =
        (g.out_w - 1) * stride + kw > w ? (g.out_w - 1) * stride + kw - w : 0;
    g.pad_top = need_h / 2;
    g.pad_left = need_w / 2;
  }
  return g;
}

namespace detail {

// Unrolls input patches into a [N*OH*OW, kh*kw*C] matrix (zero padded).
template <typename T>
std::vector<T> im2col(const Tensor<T>& input, std::size_t kh, std::size_t kw,
                      std::size_t stride, const ConvGeometry& g) {
  const std::size_t n = input.dim(0), h = input.dim(1), w = input.dim(2),
                    c = input.dim(3);
  const std::size_t patch = kh * kw * c;
  std::vector<T> cols(n * g.out_h * g.out_w * patch, T{});
  for (std::size_t in = 0; in < n; ++in) {
    for (std::size_t oh = 0; oh < g.out_h; ++oh) {
      for (std::size_t ow = 0; ow < g.out_w; ++ow) {
        T* row = cols.data() + ((in * g.out_h + oh) * g.out_w + ow) * patch;
        for (std::size_t fh = 0; fh < kh; ++fh) {
          const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * stride) +
                                    static_cast<std::ptrdiff_t>(fh) -
                                    static_cast<std::ptrdiff_t>(g.pad_top);
          if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(h)) continue;
          for (std::size_t fw = 0; fw < kw; ++fw) {
            const std::ptrdiff_t iw =
                static_cast<std::ptrdiff_t>(ow * stride) +
                static_cast<std::ptrdiff_t>(fw) -
                static_cast<std::ptrdiff_t>(g.pad_left);
            if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(w)) continue;
            const T* src = input.data() +
                           ((in * h + static_cast<std::size_t>(ih)) * w +
                            static_cast<std::size_t>(iw)) *
                               c;
            std::copy(src, src + c, row + (fh * kw + fw) * c);
          }
        }
      }
    }
  }
  return cols;
}

template <typename T>
void check_conv_args(const Tensor<T>& input, const Tensor<T>& weights,
                     const Tensor<T>& biases, const char* who) {
  if (input.rank() != 4) {
    throw std::invalid_argument(std::string(who) + ": input must be [N,H,W,C], got " +
                                input.shape_string());
  }
  if (weights.rank() != 4) {
    throw std::invalid_argument(std::string(who) +
                                ": weights must be [kh,kw,C,F], got " +
                                weights.shape_string());
  }
  if (weights.dim(2) != input.dim(3)) {
    throw std::invalid_argument(
        std::string(who) + ": input channels " + std::to_string(input.dim(3)) +
        " != weight channels " + std::to_string(weights.dim(2)));
  }
  if (biases.rank() != 1 || biases.dim(0) != weights.dim(3)) {
    throw std::invalid_argument(
        std::string(who) + ": biases must be [F=" +
        std::to_string(weights.dim(3)) + "], got " + biases.shape_string());
  }
}

}  // namespace detail

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& input, const Tensor<T>& weights,
                         const Tensor<T>& biases, std::size_t stride,
                         Padding padding) {
  detail::check_conv_args(input, weights, biases, "conv2d_forward");
  const std::size_t n = input.dim(0);
  const std::size_t kh = weights.dim(0), kw = weights.dim(1);
  const std::size_t f = weights.dim(3);
  const ConvGeometry g =
      conv_geometry(input.dim(1), input.dim(2), kh, kw, stride, padding);
  const std::size_t patch = kh * kw * input.dim(3);
  const std::size_t rows = n * g.out_h * g.out_w;

  const std::vector<T> cols = detail::im2col(input, kh, kw, stride, g);
  Tensor<T> out({n, g.out_h, g.out_w, f});
  matmul_accumulate(cols.data(), weights.data(), out.data(), rows, patch, f);
  for (std::size_t r = 0; r < rows; ++r) {
    T* orow = out.data() + r * f;
    for (std::size_t j = 0; j < f; ++j) orow[j] += biases[j];
  }
  return out;
}

template <typename T>
struct ConvGrads {
  Tensor<T> input;
  Tensor<T> weights;
  Tensor<T> biases;
};

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor<T>& grad_out,
                             const Tensor<T>& cached_input,
                             const Tensor<T>& weights, std::size_t stride,
                             Padding padding) {
  if (weights.rank() != 4) {
    throw std::invalid_argument("conv2d_backward: weights must be [kh,kw,C,F], got " +
                                weights.shape_string());
  }
  Tensor<T> dummy_bias({weights.dim(3)});
  detail::check_conv_args(cached_input, weights, dummy_bias, "conv2d_backward");
  const std::size_t n = cached_input.dim(0), h = cached_input.dim(1),
                    w = cached_input.dim(2), c = cached_input.dim(3);
  const std::size_t kh = weights.dim(0), kw = weights.dim(1);
  const std::size_t f = weights.dim(3);
  const ConvGeometry g = conv_geometry(h, w, kh, kw, stride, padding);
  const std::vector<std::size_t> want{n, g.out_h, g.out_w, f};
  if (grad_out.shape() != want) {
    throw std::invalid_argument("conv2d_backward: grad_out shape " +
                                grad_out.shape_string() + " != forward output " +
                                Tensor<T>::shape_string(want));
  }

  const std::size_t patch = kh * kw * c;
  const std::size_t rows = n * g.out_h * g.out_w;

  ConvGrads<T> grads{Tensor<T>({n, h, w, c}), Tensor<T>({kh, kw, c, f}),
                     Tensor<T>({f})};

  for (std::size_t r = 0; r < rows; ++r) {
    const T* grow = grad_out.data() + r * f;
    for (std::size_t j = 0; j < f; ++j) grads.biases[j] += grow[j];
  }

  const std::vector<T> cols = detail::im2col(cached_input, kh, kw, stride, g);
  matmul_at_b_accumulate(cols.data(), grad_out.data(), grads.weights.data(),
                         rows, patch, f);

  // grad wrt the unrolled patches, then scatter-add back into the input.
  std::vector<T> wt(f * patch);
  for (std::size_t p = 0; p < patch; ++p) {
    for (std::size_t j = 0; j < f; ++j) wt[j * patch + p] = weights[p * f + j];
  }
  std::vector<T> gcols(rows * patch, T{});
  matmul_accumulate(grad_out.data(), wt.data(), gcols.data(), rows, f, patch);

  for (std::size_t in = 0; in < n; ++in) {
    for (std::size_t oh = 0; oh < g.out_h; ++oh) {
      for (std::size_t ow = 0; ow < g.out_w; ++ow) {
        const T* row = gcols.data() + ((in * g.out_h + oh) * g.out_w + ow) * patch;
        for (std::size_t fh = 0; fh < kh; ++fh) {
          const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * stride) +
                                    static_cast<std::ptrdiff_t>(fh) -
                                    static_cast<std::ptrdiff_t>(g.pad_top);
          if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(h)) continue;
          for (std::size_t fw = 0; fw < kw; ++fw) {
            const std::ptrdiff_t iw =
                static_cast<std::ptrdiff_t>(ow * stride) +
                static_cast<std::ptrdiff_t>(fw) -
                static_cast<std::ptrdiff_t>(g.pad_left);
            if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(w)) continue;
            T* dst = grads.input.data() +
                     ((in * h + static_cast<std::size_t>(ih)) * w +
                      static_cast<std::size_t>(iw)) *
                         c;
            const T* src = row + (fh * kw + fw) * c;
            for (std::size_t ic = 0; ic < c; ++ic) dst[ic] += src[ic];
          }
        }
      }
    }
  }
  return grads;
}

template <typename T>
struct MaxPoolResult {
  Tensor<T> output;
  // Winning flat input index per output element; ties go to the lowest flat
  // index so backward routing is deterministic.
  std::vector<std::size_t> argmax;
  std::vector<std::size_t> input_shape;
};

template <typename T>
MaxPoolResult<T> maxpool2d_forward(const Tensor<T>& input, std::size_t pool,
                                   std::size_t stride) {
  if (input.rank() != 4) {
    throw std::invalid_argument("maxpool2d_forward: input must be [N,H,W,C], got " +
                                input.shape_string());
  }
  if (pool == 0 || stride == 0) {
    throw std::invalid_argument("maxpool2d_forward: pool and stride must be >= 1");
  }
  const std::size_t n = input.dim(0), h = input.dim(1), w = input.dim(2),
                    c = input.dim(3);
  if (pool > h || pool > w) {
    throw std::invalid_argument("maxpool2d_forward: pool " + std::to_string(pool) +
                                " larger than spatial extent " +
                                std::to_string(h) + "x" + std::to_string(w));
  }
  const std::size_t oh = (h - pool) / stride + 1;
  const std::size_t ow = (w - pool) / stride + 1;

  MaxPoolResult<T> res{Tensor<T>({n, oh, ow, c}), {}, input.shape()};
  res.argmax.resize(res.output.numel());

  for (std::size_t in = 0; in < n; ++in) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        for (std::size_t ch = 0; ch < c; ++ch) {
          std::size_t best_idx = ((in * h + y * stride) * w + x * stride) * c + ch;
          T best = input[best_idx];
          for (std::size_t fy = 0; fy < pool; ++fy) {
            for (std::size_t fx = 0; fx < pool; ++fx) {
              const std::size_t idx =
                  ((in * h + y * stride + fy) * w + x * stride + fx) * c + ch;
              if (input[idx] > best) {
                best = input[idx];
                best_idx = idx;
              }
            }
          }
          const std::size_t out_idx = ((in * oh + y) * ow + x) * c + ch;
          res.output[out_idx] = best;
          res.argmax[out_idx] = best_idx;
        }
      }
    }
  }
  return res;
}

template <typename T>
Tensor<T> maxpool2d_backward(const Tensor<T>& grad_out,
                             const MaxPoolResult<T>& cached) {
  if (grad_out.shape() != cached.output.shape()) {
    throw std::invalid_argument("maxpool2d_backward: grad_out shape " +
                                grad_out.shape_string() +
                                " does not match pooled output " +
                                cached.output.shape_string());
  }
  Tensor<T> grad_input(cached.input_shape);
  for (std::size_t i = 0; i < grad_out.numel(); ++i) {
    grad_input[cached.argmax[i]] += grad_out[i];
  }
  return grad_input;
}

template <typename T>
Tensor<T> dense_forward(const Tensor<T>& input, const Tensor<T>& weights,
                        const Tensor<T>& biases) {
  if (input.rank() != 2 || weights.rank() != 2) {
    throw std::invalid_argument("dense_forward: need input [N,D] and weights [D,U], got " +
                                input.shape_string() + " and " +
                                weights.shape_string());
  }
  if (input.dim(1) != weights.dim(0)) {
    throw std::invalid_argument(
        "dense_forward: inner dimensions disagree, input D=" +
        std::to_string(input.dim(1)) + " vs weights D=" +
        std::to_string(weights.dim(0)));
  }
  if (biases.rank() != 1 || biases.dim(0) != weights.dim(1)) {
    throw std::invalid_argument("dense_forward: biases must be [U=" +
                                std::to_string(weights.dim(1)) + "], got " +
                                biases.shape_string());
  }
  const std::size_t n = input.dim(0), d = input.dim(1), u = weights.dim(1);
  Tensor<T> out({n, u});
  matmul_accumulate(input.data(), weights.data(), out.data(), n, d, u);
  for (std::size_t i = 0; i < n; ++i) {
    T* row = out.data() + i * u;
    for (std::size_t j = 0; j < u; ++j) row[j] += biases[j];
  }
  return out;
}

template <typename T>
struct DenseGrads {
  Tensor<T> input;
  Tensor<T> weights;
  Tensor<T> biases;
};

template <typename T>
DenseGrads<T> dense_backward(const Tensor<T>& grad_out,
                             const Tensor<T>& cached_input,
                             const Tensor<T>& weights) {
  const std::size_t n = cached_input.dim(0), d = cached_input.dim(1);
  const std::size_t u = weights.dim(1);
  if (weights.rank() != 2 || weights.dim(0) != d) {
    throw std::invalid_argument("dense_backward: weights " + weights.shape_string() +
                                " do not match input " +
                                cached_input.shape_string());
  }
  const std::vector<std::size_t> want{n, u};
  if (grad_out.shape() != want) {
    throw std::invalid_argument("dense_backward: grad_out shape " +
                                grad_out.shape_string() + " != forward output " +
                                Tensor<T>::shape_string(want));
  }
  DenseGrads<T> grads{Tensor<T>({n, d}), Tensor<T>({d, u}), Tensor<T>({u})};

  for (std::size_t i = 0; i < n; ++i) {
    const T* grow = grad_out.data() + i * u;
    for (std::size_t j = 0; j < u; ++j) grads.biases[j] += grow[j];
  }
  matmul_at_b_accumulate(cached_input.data(), grad_out.data(),
                         grads.weights.data(), n, d, u);

  std::vector<T> wt(u * d);
  for (std::size_t p = 0; p < d; ++p) {
    for (std::size_t j = 0; j < u; ++j) wt[j * d + p] = weights[p * u + j];
  }
  matmul_accumulate(grad_out.data(), wt.data(), grads.input.data(), n, u, d);
  return grads;
}

inline void check_negative_slope(double slope) {
  if (!(slope >= 0.0 && slope < 1.0)) {
    throw std::invalid_argument("leaky_relu: negative_slope must be in [0,1), got " +
                                std::to_string(slope));
  }
}

template <typename T>
Tensor<T> leaky_relu_forward(const Tensor<T>& input, double negative_slope) {
  check_negative_slope(negative_slope);
  Tensor<T> out(input.shape());
  const T slope = static_cast<T>(negative_slope);
  for (std::size_t i = 0; i < input.numel(); ++i) {
    const T x = input[i];
    out[i] = x >= T{} ? x : slope * x;
  }
  return out;
}

template <typename T>
Tensor<T> leaky_relu_backward(const Tensor<T>& grad_out,
                              const Tensor<T>& cached_input,
                              double negative_slope) {
  check_negative_slope(negative_slope);
  if (!grad_out.same_shape(cached_input)) {
    throw std::invalid_argument("leaky_relu_backward: grad_out shape " +
                                grad_out.shape_string() + " != input " +
                                cached_input.shape_string());
  }
  Tensor<T> out(grad_out.shape());
  const T slope = static_cast<T>(negative_slope);
  for (std::size_t i = 0; i < grad_out.numel(); ++i) {
    out[i] = cached_input[i] >= T{} ? grad_out[i] : slope * grad_out[i];
  }
  return out;
}

template <typename T>
struct DropoutResult {
  Tensor<T> output;
  Tensor<T> mask;  // 1 where kept, 0 where dropped
};

inline void check_keep_prob(double keep_prob) {
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
    throw std::invalid_argument("dropout: keep_prob must be in (0,1], got " +
                                std::to_string(keep_prob));
  }
}

// Inverted dropout: kept activations are scaled by 1/keep_prob at train time
// so that inference is the identity.
template <typename T>
DropoutResult<T> dropout_forward(const Tensor<T>& input, double keep_prob,
                                 Mode mode, Rng& rng) {
  check_keep_prob(keep_prob);
  DropoutResult<T> res{Tensor<T>(input.shape()),
                       Tensor<T>::full(input.shape(), T{1})};
  if (mode == Mode::infer || keep_prob == 1.0) {
    res.output = input;
    return res;
  }
  const T inv = static_cast<T>(1.0 / keep_prob);
  for (std::size_t i = 0; i < input.numel(); ++i) {
    if (rng.uniform() < keep_prob) {
      res.output[i] = input[i] * inv;
    } else {
      res.output[i] = T{};
      res.mask[i] = T{};
    }
  }
  return res;
}

template <typename T>
Tensor<T> dropout_backward(const Tensor<T>& grad_out, const Tensor<T>& mask,
                           double keep_prob) {
  check_keep_prob(keep_prob);
  if (!grad_out.same_shape(mask)) {
    throw std::invalid_argument("dropout_backward: grad_out shape " +
                                grad_out.shape_string() + " != mask " +
                                mask.shape_string());
  }
  Tensor<T> out(grad_out.shape());
  const T inv = static_cast<T>(1.0 / keep_prob);
  for (std::size_t i = 0; i < grad_out.numel(); ++i) {
    out[i] = grad_out[i] * mask[i] * inv;
  }
  return out;
}

}  // namespace playcomm::nn
