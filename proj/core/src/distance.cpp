#include "playcomm/cluster/distance.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace playcomm::cluster {

std::vector<double> normalize_block(std::span<const float> block,
                                    const char* what) {
  double norm2 = 0.0;
  for (float v : block) norm2 += static_cast<double>(v) * static_cast<double>(v);
  if (norm2 == 0.0) {
    throw std::invalid_argument(std::string("combine: zero ") + what + " block");
  }
  const double inv = 1.0 / std::sqrt(norm2);
  std::vector<double> out(block.size());
  for (std::size_t i = 0; i < block.size(); ++i) {
    out[i] = static_cast<double>(block[i]) * inv;
  }
  return out;
}

std::vector<double> combine(std::span<const float> image_vec,
                            std::span<const float> sentence_vec) {
  if (image_vec.empty() || sentence_vec.empty()) {
    throw std::invalid_argument("combine: empty block");
  }
  std::vector<double> out = normalize_block(image_vec, "image");
  const std::vector<double> sent = normalize_block(sentence_vec, "sentence");
  out.insert(out.end(), sent.begin(), sent.end());
  return out;
}

double mse_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("mse_distance: lengths " +
                                std::to_string(a.size()) + " and " +
                                std::to_string(b.size()) + " differ");
  }
  if (a.empty()) throw std::invalid_argument("mse_distance: empty vectors");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

DistanceMatrix::DistanceMatrix(const std::vector<std::vector<double>>& points,
                               std::size_t precompute_limit)
    : points_(&points), n_(points.size()) {
  if (n_ == 0) throw std::invalid_argument("DistanceMatrix: no points");
  for (std::size_t i = 1; i < n_; ++i) {
    if (points[i].size() != points[0].size()) {
      throw std::invalid_argument("DistanceMatrix: inconsistent point dimensions");
    }
  }
  if (n_ <= precompute_limit) {
    cache_.assign(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double d = mse_distance(points[i], points[j]);
        cache_[i * n_ + j] = d;
        cache_[j * n_ + i] = d;
      }
    }
  }
}

}  // namespace playcomm::cluster
