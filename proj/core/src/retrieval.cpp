#include "playcomm/eval/retrieval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "playcomm/errors.hpp"
#include "playcomm/text/embedding.hpp"

namespace playcomm::eval {

RetrievalResult retrieve_top_k(std::span<const float> pred,
                               const RetrievalPool& pool, std::size_t k) {
  if (k == 0) throw std::invalid_argument("retrieve_top_k: k must be positive");
  if (k > pool.size()) {
    throw std::invalid_argument("retrieve_top_k: k=" + std::to_string(k) +
                                " exceeds pool size " +
                                std::to_string(pool.size()));
  }
  std::vector<double> scores(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    scores[i] = text::cosine_similarity(pred, std::span<const float>(pool[i].second));
  }
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RetrievalResult res;
  for (std::size_t i = 0; i < k; ++i) {
    res.ranked.emplace_back(pool[order[i]].first, scores[order[i]]);
  }
  return res;
}

RetrievalPool retrieval_pool(const data::Dataset& dataset, data::Split split) {
  RetrievalPool pool;
  for (const auto& p : dataset.pairs) {
    if (p.split != split) continue;
    if (p.sentence_embedding.empty()) {
      throw InputError("retrieval_pool: frame " + p.frame_id +
                       " has no sentence embedding");
    }
    pool.emplace_back(p.utterance_text, p.sentence_embedding);
  }
  return pool;
}

RetrievalResult commentate(const nn::ModelCheckpoint& checkpoint,
                           const std::string& image_path,
                           const RetrievalPool& pool, std::size_t k) {
  nn::Model<float> model = nn::model_from_checkpoint(checkpoint);
  const auto& arch = checkpoint.arch;
  Tensor<float> frame =
      data::decode_frame(image_path, arch.input_height, arch.input_width);
  const Tensor<float> batch = frame.reshaped(
      {1, arch.input_height, arch.input_width, arch.input_channels});
  const Tensor<float> pred = model.predict(batch);
  RetrievalResult res =
      retrieve_top_k(std::span<const float>(pred.data(), arch.output_dim), pool, k);
  res.frame_id = image_path;
  return res;
}

std::string format_retrieval(const RetrievalResult& result) {
  std::ostringstream os;
  char score[32];
  for (const auto& [utterance, cosine] : result.ranked) {
    std::snprintf(score, sizeof(score), "%.4f", cosine);
    os << score << '\t' << utterance << '\n';
  }
  return os.str();
}

}  // namespace playcomm::eval
