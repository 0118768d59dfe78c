#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "playcomm/data/dataset.hpp"
#include "playcomm/nn/checkpoint.hpp"

namespace playcomm::eval {

struct RetrievalResult {
  std::string frame_id;
  // (utterance text, cosine score), scores non-increasing; ties broken by
  // pool order. Duplicate texts are permitted.
  std::vector<std::pair<std::string, double>> ranked;
};

using RetrievalPool = std::vector<std::pair<std::string, std::vector<float>>>;

// Top-k pool entries by cosine similarity to the prediction.
RetrievalResult retrieve_top_k(std::span<const float> pred,
                               const RetrievalPool& pool, std::size_t k = 5);

// (utterance, embedding) pairs for every pair in the given split, in
// dataset order.
RetrievalPool retrieval_pool(const data::Dataset& dataset, data::Split split);

// predict then retrieve: the user-facing composition.
RetrievalResult commentate(const nn::ModelCheckpoint& checkpoint,
                           const std::string& image_path,
                           const RetrievalPool& pool, std::size_t k = 5);

// "score<TAB>utterance" lines, scores descending.
std::string format_retrieval(const RetrievalResult& result);

}  // namespace playcomm::eval
