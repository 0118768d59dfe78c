#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace playcomm::text {

inline constexpr std::size_t kEmbeddingDim = 512;

enum class EmbeddingSource { external, fallback };

struct SentenceEmbedding {
  std::vector<float> vector;  // exactly kEmbeddingDim, finite
  EmbeddingSource source = EmbeddingSource::external;
  std::uint64_t text_hash = 0;
};

// dot(a,b) / (|a||b|), accumulated in double. Zero vectors are rejected.
double cosine_similarity(std::span<const float> a, std::span<const float> b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct IdVectorFile {
  std::map<std::string, std::vector<float>> records;
  std::size_t dim = 0;
};

// Reads the tab-separated "id<TAB>v1<TAB>...<TAB>vD" line format shared by
// sentence-embedding and image-feature files. required_dim == 0 means "any,
// but consistent across records". Duplicate ids, dimension mismatches and
// non-finite values are rejected with the offending id.
IdVectorFile read_id_vector_file(const std::string& path,
                                 std::size_t required_dim);

// Sentence-embedding files must be exactly kEmbeddingDim wide.
std::map<std::string, SentenceEmbedding> ingest_embeddings(
    const std::string& path);

void write_id_vector_file(const std::string& path,
                          const std::map<std::string, std::vector<float>>& records);

}  // namespace playcomm::text
