#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace playcomm::cluster {

// L2-normalizes a block; zero blocks are rejected.
std::vector<double> normalize_block(std::span<const float> block,
                                    const char* what);

// Per-block L2 normalization then concatenation, so the (usually much
// wider) image block cannot dominate the distance by dimensionality alone.
std::vector<double> combine(std::span<const float> image_vec,
                            std::span<const float> sentence_vec);

// Mean squared component difference.
double mse_distance(std::span<const double> a, std::span<const double> b);

// Pairwise distances over a point set. The full matrix is precomputed when
// n <= precompute_limit (n^2 doubles), otherwise distances are computed on
// the fly. The referenced points must outlive this object.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(const std::vector<std::vector<double>>& points,
                          std::size_t precompute_limit = 6000);

  std::size_t size() const { return n_; }

  double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    if (!cache_.empty()) return cache_[i * n_ + j];
    return mse_distance((*points_)[i], (*points_)[j]);
  }

 private:
  const std::vector<std::vector<double>>* points_;
  std::size_t n_;
  std::vector<double> cache_;
};

}  // namespace playcomm::cluster
