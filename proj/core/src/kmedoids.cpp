#include "playcomm/cluster/kmedoids.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "playcomm/hash.hpp"
#include "playcomm/rng.hpp"

namespace playcomm::cluster {

namespace {

constexpr double kImprovementEps = 1e-12;

struct NearestInfo {
  std::vector<std::size_t> nearest;       // medoid list position
  std::vector<double> nearest_dist;
  std::vector<double> second_dist;
  double total = 0.0;
};

NearestInfo compute_nearest(const DistanceMatrix& d,
                            const std::vector<std::size_t>& medoids) {
  const std::size_t n = d.size();
  NearestInfo info;
  info.nearest.assign(n, 0);
  info.nearest_dist.assign(n, std::numeric_limits<double>::infinity());
  info.second_dist.assign(n, std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t m = 0; m < medoids.size(); ++m) {
      const double dist = d(j, medoids[m]);
      if (dist < info.nearest_dist[j]) {
        info.second_dist[j] = info.nearest_dist[j];
        info.nearest_dist[j] = dist;
        info.nearest[j] = m;
      } else if (dist < info.second_dist[j]) {
        info.second_dist[j] = dist;
      }
    }
    info.total += info.nearest_dist[j];
  }
  return info;
}

std::vector<std::size_t> build_init(const DistanceMatrix& d, std::size_t k) {
  const std::size_t n = d.size();
  std::vector<std::size_t> medoids;
  std::vector<bool> is_medoid(n, false);

  // First medoid: the most central point.
  std::size_t best = 0;
  double best_total = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += d(i, j);
    if (total < best_total) {
      best_total = total;
      best = i;
    }
  }
  medoids.push_back(best);
  is_medoid[best] = true;

  std::vector<double> nearest_dist(n);
  for (std::size_t j = 0; j < n; ++j) nearest_dist[j] = d(j, best);

  // Each further medoid maximizes the total decrease in distance.
  while (medoids.size() < k) {
    std::size_t best_i = n;
    double best_profit = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (is_medoid[i]) continue;
      double profit = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (is_medoid[j] || j == i) continue;
        const double gain = nearest_dist[j] - d(i, j);
        if (gain > 0.0) profit += gain;
      }
      if (profit > best_profit) {
        best_profit = profit;
        best_i = i;
      }
    }
    medoids.push_back(best_i);
    is_medoid[best_i] = true;
    for (std::size_t j = 0; j < n; ++j) {
      nearest_dist[j] = std::min(nearest_dist[j], d(j, best_i));
    }
  }
  std::sort(medoids.begin(), medoids.end());
  return medoids;
}

std::vector<std::size_t> random_init(const DistanceMatrix& d, std::size_t k,
                                     Rng& rng) {
  const std::size_t n = d.size();
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  rng.shuffle(pool);
  std::vector<std::size_t> medoids(pool.begin(),
                                   pool.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(medoids.begin(), medoids.end());
  return medoids;
}

// Steepest-descent SWAP: apply the best strictly improving (medoid, point)
// exchange per pass. Returns the refined solution.
KMedoidsResult swap_descent(const DistanceMatrix& d,
                            std::vector<std::size_t> medoids,
                            std::size_t max_iters) {
  const std::size_t n = d.size();
  NearestInfo info = compute_nearest(d, medoids);
  std::vector<bool> is_medoid(n, false);
  for (std::size_t m : medoids) is_medoid[m] = true;

  std::size_t passes = 0;
  while (passes < max_iters) {
    ++passes;
    double best_delta = -kImprovementEps;
    std::size_t best_m = medoids.size(), best_h = n;

    for (std::size_t m = 0; m < medoids.size(); ++m) {
      for (std::size_t h = 0; h < n; ++h) {
        if (is_medoid[h]) continue;
        double delta = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double djh = d(j, h);
          if (info.nearest[j] == m) {
            delta += std::min(djh, info.second_dist[j]) - info.nearest_dist[j];
          } else if (djh < info.nearest_dist[j]) {
            delta += djh - info.nearest_dist[j];
          }
        }
        if (delta < best_delta) {
          best_delta = delta;
          best_m = m;
          best_h = h;
        }
      }
    }

    if (best_h == n) {
      --passes;  // nothing applied this pass
      break;
    }
    is_medoid[medoids[best_m]] = false;
    is_medoid[best_h] = true;
    medoids[best_m] = best_h;
    info = compute_nearest(d, medoids);
  }

  KMedoidsResult res;
  res.medoids = std::move(medoids);
  res.assignments.resize(n);
  for (std::size_t j = 0; j < n; ++j) res.assignments[j] = info.nearest[j];
  res.total_distance = info.total;
  res.distortion = info.total / static_cast<double>(n);
  res.swap_passes = passes;
  return res;
}

std::size_t count_distinct(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bool dup = false;
    for (std::size_t j = 0; j < i; ++j) {
      if (d(i, j) == 0.0) {
        dup = true;
        break;
      }
    }
    if (!dup) ++distinct;
  }
  return distinct;
}

}  // namespace

KMedoidsResult k_medoids_seeded(
    const DistanceMatrix& distances, std::size_t k, std::uint64_t seed,
    std::size_t max_iters,
    const std::vector<std::vector<std::size_t>>& extra_inits) {
  const std::size_t n = distances.size();
  if (k == 0 || k > n) {
    throw std::invalid_argument("k_medoids: k=" + std::to_string(k) +
                                " out of range for n=" + std::to_string(n));
  }
  const std::size_t distinct = count_distinct(distances);
  if (k > distinct) {
    throw std::invalid_argument("k_medoids: k=" + std::to_string(k) +
                                " exceeds the " + std::to_string(distinct) +
                                " distinct points");
  }

  std::vector<std::vector<std::size_t>> inits;
  inits.push_back(build_init(distances, k));
  for (std::uint64_t r = 1; r < 3; ++r) {
    Rng rng(derive_seed(seed, 0xc105 + r));
    inits.push_back(random_init(distances, k, rng));
  }
  for (const auto& extra : extra_inits) {
    if (extra.size() == k) inits.push_back(extra);
  }

  KMedoidsResult best;
  bool have = false;
  for (const auto& init : inits) {
    KMedoidsResult res = swap_descent(distances, init, max_iters);
    if (!have || res.total_distance < best.total_distance - kImprovementEps) {
      best = std::move(res);
      have = true;
    }
  }
  return best;
}

KMedoidsResult k_medoids(const DistanceMatrix& distances, std::size_t k,
                         std::uint64_t seed, std::size_t max_iters) {
  return k_medoids_seeded(distances, k, seed, max_iters, {});
}

KEstimate estimate_k(const DistanceMatrix& distances, std::size_t k_min,
                     std::size_t k_max, double ratio_threshold,
                     std::uint64_t seed, std::size_t max_iters) {
  if (k_min < 2) throw std::invalid_argument("estimate_k: k_min must be >= 2");
  if (k_max < k_min) {
    throw std::invalid_argument("estimate_k: k_min " + std::to_string(k_min) +
                                " exceeds k_max " + std::to_string(k_max));
  }
  if (k_max > distances.size()) {
    throw std::invalid_argument("estimate_k: k_max " + std::to_string(k_max) +
                                " exceeds point count " +
                                std::to_string(distances.size()));
  }
  if (!(ratio_threshold > 1.0)) {
    throw std::invalid_argument("estimate_k: ratio_threshold must exceed 1");
  }

  KEstimate est;
  const std::vector<std::size_t>* prev = nullptr;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    std::vector<std::vector<std::size_t>> extra;
    if (prev) {
      // Warm start: previous best plus the point that most reduces the total
      // distance; guarantees a non-increasing distortion curve.
      std::vector<std::size_t> grown = *prev;
      const std::size_t n = distances.size();
      std::vector<bool> is_medoid(n, false);
      for (std::size_t m : grown) is_medoid[m] = true;
      std::vector<double> nearest(n);
      for (std::size_t j = 0; j < n; ++j) {
        double bestd = std::numeric_limits<double>::infinity();
        for (std::size_t m : grown) bestd = std::min(bestd, distances(j, m));
        nearest[j] = bestd;
      }
      std::size_t best_i = n;
      double best_profit = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (is_medoid[i]) continue;
        double profit = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double gain = nearest[j] - distances(i, j);
          if (gain > 0.0) profit += gain;
        }
        if (profit > best_profit) {
          best_profit = profit;
          best_i = i;
        }
      }
      if (best_i < n) {
        grown.push_back(best_i);
        std::sort(grown.begin(), grown.end());
        extra.push_back(std::move(grown));
      }
    }
    KMedoidsResult res =
        k_medoids_seeded(distances, k, derive_seed(seed, k), max_iters, extra);
    est.distortion_per_k[k] = res.distortion;
    est.runs[k] = std::move(res);
    prev = &est.runs[k].medoids;
  }

  // Monotonicity is enforced by the warm starts above; a violation would be
  // a bug, not data.
  double last = std::numeric_limits<double>::infinity();
  for (const auto& [k, dist] : est.distortion_per_k) {
    if (dist > last + kImprovementEps) {
      throw std::runtime_error("estimate_k: distortion increased at K=" +
                               std::to_string(k));
    }
    last = std::min(last, dist);
  }

  est.selected_k = k_max;
  for (std::size_t k = k_min; k < k_max; ++k) {
    const double dk = est.distortion_per_k[k];
    const double dk1 = est.distortion_per_k[k + 1];
    if (dk == 0.0) {
      est.selected_k = k;  // already perfect; flat curve from here
      break;
    }
    if (dk1 == 0.0) {
      est.selected_k = k + 1;  // immediate elbow
      break;
    }
    if (dk / dk1 < ratio_threshold) {
      est.selected_k = k;
      break;
    }
  }
  return est;
}

}  // namespace playcomm::cluster
