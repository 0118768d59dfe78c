#include <benchmark/benchmark.h>

#include "playcomm/eval/retrieval.hpp"
#include "playcomm/rng.hpp"
#include "playcomm/text/embedding.hpp"

using namespace playcomm;

namespace {

std::vector<float> random_vec(Rng& rng, std::size_t dim) {
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(rng.normal());
  return v;
}

void TopK(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  eval::RetrievalPool pool;
  for (std::size_t i = 0; i < n; ++i) {
    pool.emplace_back("utterance " + std::to_string(i),
                      random_vec(rng, text::kEmbeddingDim));
  }
  const std::vector<float> query = random_vec(rng, text::kEmbeddingDim);
  for (auto _ : state) {
    auto res = eval::retrieve_top_k(query, pool, 5);
    benchmark::DoNotOptimize(res.ranked.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(TopK)->Arg(1000)->Arg(10000);

void Cosine(benchmark::State& state) {
  Rng rng(4);
  const std::vector<float> a = random_vec(rng, text::kEmbeddingDim);
  const std::vector<float> b = random_vec(rng, text::kEmbeddingDim);
  for (auto _ : state) {
    benchmark::DoNotOptimize(text::cosine_similarity(a, b));
  }
}
BENCHMARK(Cosine);

}  // namespace
