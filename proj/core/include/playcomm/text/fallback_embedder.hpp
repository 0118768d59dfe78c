#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "playcomm/text/embedding.hpp"

namespace playcomm::text {

struct FallbackEmbedderConfig {
  std::uint64_t seed = 0;
  std::size_t n_buckets = 4096;
};

// Deterministic stand-in for an external sentence encoder: word-unigram and
// character-trigram counts are feature-hashed into n_buckets, projected
// through a seeded Gaussian matrix to kEmbeddingDim and L2-normalized.
// A pure function of (normalized text, seed).
class FallbackEmbedder {
 public:
  explicit FallbackEmbedder(FallbackEmbedderConfig config);

  SentenceEmbedding embed(const std::string& raw_text) const;

  const FallbackEmbedderConfig& config() const { return config_; }

 private:
  FallbackEmbedderConfig config_;
  std::vector<float> projection_;  // [n_buckets x kEmbeddingDim]
};

}  // namespace playcomm::text
