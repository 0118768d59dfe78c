#include <benchmark/benchmark.h>

#include "playcomm/nn/ops.hpp"
#include "playcomm/rng.hpp"

using namespace playcomm;
using namespace playcomm::nn;

namespace {

TensorF random_tensor(std::vector<std::size_t> shape, std::uint64_t seed) {
  Rng rng(seed);
  TensorF t(std::move(shape));
  for (std::size_t i = 0; i < t.numel(); ++i) {
    t[i] = static_cast<float>(rng.normal());
  }
  return t;
}

void ConvForward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  TensorF input = random_tensor({n, 64, 64, 3}, 1);
  TensorF weights = random_tensor({3, 3, 3, 32}, 2);
  TensorF biases = random_tensor({32}, 3);
  for (auto _ : state) {
    TensorF out = conv2d_forward(input, weights, biases, 1, Padding::same);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(ConvForward)->Arg(1)->Arg(8)->Arg(32);

void ConvBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  TensorF input = random_tensor({n, 64, 64, 3}, 1);
  TensorF weights = random_tensor({3, 3, 3, 32}, 2);
  TensorF biases = random_tensor({32}, 3);
  TensorF out = conv2d_forward(input, weights, biases, 1, Padding::same);
  TensorF grad = random_tensor(out.shape(), 4);
  for (auto _ : state) {
    auto grads = conv2d_backward(grad, input, weights, 1, Padding::same);
    benchmark::DoNotOptimize(grads.input.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(ConvBackward)->Arg(1)->Arg(8);

void DenseForward(benchmark::State& state) {
  TensorF input = random_tensor({32, 4096}, 1);
  TensorF weights = random_tensor({4096, 1024}, 2);
  TensorF biases = random_tensor({1024}, 3);
  for (auto _ : state) {
    TensorF out = dense_forward(input, weights, biases);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(DenseForward);

void MaxPoolForward(benchmark::State& state) {
  TensorF input = random_tensor({32, 64, 64, 32}, 1);
  for (auto _ : state) {
    auto res = maxpool2d_forward(input, 2, 2);
    benchmark::DoNotOptimize(res.output.data());
  }
}
BENCHMARK(MaxPoolForward);

}  // namespace
