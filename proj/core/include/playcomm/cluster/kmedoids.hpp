#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "playcomm/cluster/distance.hpp"

namespace playcomm::cluster {

struct KMedoidsResult {
  std::vector<std::size_t> medoids;      // point indices, one per cluster
  std::vector<std::size_t> assignments;  // point index -> cluster id
  double total_distance = 0.0;
  double distortion = 0.0;               // mean distance to the assigned medoid
  std::size_t swap_passes = 0;
};

// PAM: greedy BUILD initialization followed by steepest-descent SWAP passes
// until no swap improves the total distance or max_iters passes have run.
// Three seeded restarts (BUILD plus two random initializations); best kept.
// Ties everywhere break towards the lowest index, so results are
// deterministic per (points, k, seed).
KMedoidsResult k_medoids(const DistanceMatrix& distances, std::size_t k,
                         std::uint64_t seed, std::size_t max_iters = 100);

// Same, with extra initial medoid sets to consider (used by estimate_k to
// warm-start K from the best K-1 solution).
KMedoidsResult k_medoids_seeded(
    const DistanceMatrix& distances, std::size_t k, std::uint64_t seed,
    std::size_t max_iters,
    const std::vector<std::vector<std::size_t>>& extra_inits);

struct KEstimate {
  std::size_t selected_k = 0;
  std::map<std::size_t, double> distortion_per_k;
  std::map<std::size_t, KMedoidsResult> runs;
};

// Runs k_medoids for each K in [k_min, k_max] and picks the smallest K whose
// distortion ratio distortion(K)/distortion(K+1) drops below ratio_threshold
// (diminishing returns); k_max if none does. The curve is non-increasing by
// construction: each K is additionally warm-started from the previous best.
KEstimate estimate_k(const DistanceMatrix& distances, std::size_t k_min,
                     std::size_t k_max, double ratio_threshold,
                     std::uint64_t seed, std::size_t max_iters = 100);

}  // namespace playcomm::cluster
