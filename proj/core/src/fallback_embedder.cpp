#include "playcomm/text/fallback_embedder.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "playcomm/errors.hpp"
#include "playcomm/hash.hpp"
#include "playcomm/rng.hpp"
#include "playcomm/text/normalize.hpp"

namespace playcomm::text {

FallbackEmbedder::FallbackEmbedder(FallbackEmbedderConfig config)
    : config_(config) {
  if (config_.n_buckets < kEmbeddingDim) {
    throw std::invalid_argument("FallbackEmbedder: n_buckets must be >= " +
                                std::to_string(kEmbeddingDim));
  }
  Rng rng(derive_seed(config_.seed, 0xfe11bac));
  projection_.resize(config_.n_buckets * kEmbeddingDim);
  for (auto& v : projection_) v = static_cast<float>(rng.normal());
}

SentenceEmbedding FallbackEmbedder::embed(const std::string& raw_text) const {
  const std::string norm = normalize(raw_text);
  if (norm.empty()) {
    throw InputError("fallback_embed: text is empty after normalization");
  }

  // Sparse bucket counts: word unigrams plus character trigrams of the
  // normalized string.
  std::map<std::size_t, double> counts;
  std::size_t pos = 0;
  while (pos < norm.size()) {
    std::size_t end = norm.find(' ', pos);
    if (end == std::string::npos) end = norm.size();
    const std::uint64_t h = fnv1a64("w:" + norm.substr(pos, end - pos));
    counts[h % config_.n_buckets] += 1.0;
    pos = end + 1;
  }
  if (norm.size() >= 3) {
    for (std::size_t i = 0; i + 3 <= norm.size(); ++i) {
      const std::uint64_t h = fnv1a64("c:" + norm.substr(i, 3));
      counts[h % config_.n_buckets] += 1.0;
    }
  }

  std::vector<double> acc(kEmbeddingDim, 0.0);
  for (const auto& [bucket, count] : counts) {
    const float* row = projection_.data() + bucket * kEmbeddingDim;
    for (std::size_t j = 0; j < kEmbeddingDim; ++j) {
      acc[j] += count * static_cast<double>(row[j]);
    }
  }

  double norm2 = 0.0;
  for (double v : acc) norm2 += v * v;
  if (norm2 == 0.0) {
    throw std::runtime_error("fallback_embed: degenerate zero projection");
  }
  const double inv = 1.0 / std::sqrt(norm2);

  SentenceEmbedding emb;
  emb.vector.resize(kEmbeddingDim);
  for (std::size_t j = 0; j < kEmbeddingDim; ++j) {
    emb.vector[j] = static_cast<float>(acc[j] * inv);
  }
  emb.source = EmbeddingSource::fallback;
  emb.text_hash = fnv1a64(norm);
  return emb;
}

}  // namespace playcomm::text
