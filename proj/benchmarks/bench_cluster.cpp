#include <benchmark/benchmark.h>

#include "playcomm/cluster/kmedoids.hpp"
#include "playcomm/rng.hpp"

using namespace playcomm;
using namespace playcomm::cluster;

namespace {

std::vector<std::vector<double>> blobs(std::size_t n, std::size_t dim,
                                       std::size_t centers, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> points;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % centers;
    std::vector<double> p(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      p[d] = static_cast<double>(c) * 10.0 + rng.normal() * 0.5;
    }
    points.push_back(std::move(p));
  }
  return points;
}

void DistanceMatrixBuild(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto points = blobs(n, 64, 4, 7);
  for (auto _ : state) {
    DistanceMatrix m(points);
    benchmark::DoNotOptimize(m.size());
  }
}
BENCHMARK(DistanceMatrixBuild)->Arg(256)->Arg(1024);

void PamSwap(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto points = blobs(n, 64, 4, 7);
  DistanceMatrix m(points);
  for (auto _ : state) {
    auto res = k_medoids(m, 4, 11);
    benchmark::DoNotOptimize(res.total_distance);
  }
}
BENCHMARK(PamSwap)->Arg(128)->Arg(512);

void EstimateK(benchmark::State& state) {
  const auto points = blobs(256, 32, 3, 7);
  DistanceMatrix m(points);
  for (auto _ : state) {
    auto est = estimate_k(m, 2, 6, 1.15, 11);
    benchmark::DoNotOptimize(est.selected_k);
  }
}
BENCHMARK(EstimateK);

}  // namespace
