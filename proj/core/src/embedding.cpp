#include "playcomm/text/embedding.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "playcomm/errors.hpp"
#include "playcomm/hash.hpp"

namespace playcomm::text {

namespace {

template <typename T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine_similarity: lengths " +
                                std::to_string(a.size()) + " and " +
                                std::to_string(b.size()) + " differ");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = static_cast<double>(a[i]);
    const double y = static_cast<double>(b[i]);
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("cosine_similarity: zero vector");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  return cosine_impl(a, b);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  return cosine_impl(a, b);
}

IdVectorFile read_id_vector_file(const std::string& path,
                                 std::size_t required_dim) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open vector file " + path);

  IdVectorFile out;
  out.dim = required_dim;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    const std::size_t first_tab = line.find('\t');
    if (first_tab == std::string::npos) {
      throw InputError(path + ":" + std::to_string(line_no) +
                       ": expected id<TAB>values");
    }
    const std::string id = line.substr(0, first_tab);
    if (id.empty()) {
      throw InputError(path + ":" + std::to_string(line_no) + ": empty id");
    }
    if (out.records.contains(id)) {
      throw InputError(path + ": duplicate id '" + id + "' at line " +
                       std::to_string(line_no));
    }

    std::vector<float> values;
    std::size_t pos = first_tab + 1;
    while (pos <= line.size()) {
      std::size_t next = line.find('\t', pos);
      if (next == std::string::npos) next = line.size();
      const char* begin = line.data() + pos;
      const char* end = line.data() + next;
      float v = 0.0f;
      const auto res = std::from_chars(begin, end, v);
      if (res.ec != std::errc{} || res.ptr != end) {
        throw InputError(path + ": malformed numeric field for id '" + id +
                         "' at line " + std::to_string(line_no));
      }
      if (!std::isfinite(v)) {
        throw InputError(path + ": non-finite value for id '" + id + "'");
      }
      values.push_back(v);
      pos = next + 1;
    }

    if (out.dim == 0) {
      out.dim = values.size();
    }
    if (values.size() != out.dim) {
      throw InputError(path + ": id '" + id + "' has dimension " +
                       std::to_string(values.size()) + ", expected " +
                       std::to_string(out.dim));
    }
    out.records.emplace(id, std::move(values));
  }
  if (out.records.empty()) {
    throw InputError(path + ": no records");
  }
  return out;
}

std::map<std::string, SentenceEmbedding> ingest_embeddings(
    const std::string& path) {
  IdVectorFile file = read_id_vector_file(path, kEmbeddingDim);
  std::map<std::string, SentenceEmbedding> out;
  for (auto& [id, vec] : file.records) {
    SentenceEmbedding emb;
    emb.vector = std::move(vec);
    emb.source = EmbeddingSource::external;
    emb.text_hash = fnv1a64(id);
    out.emplace(id, std::move(emb));
  }
  return out;
}

void write_id_vector_file(
    const std::string& path,
    const std::map<std::string, std::vector<float>>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot open " + path + " for writing");
  char buf[64];
  for (const auto& [id, vec] : records) {
    out << id;
    for (float v : vec) {
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
      out << '\t' << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace playcomm::text
