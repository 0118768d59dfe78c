#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "playcomm/data/frames.hpp"
#include "playcomm/data/transcript.hpp"
#include "playcomm/text/embedding.hpp"

namespace playcomm::data {

enum class Split { train, test };

struct FrameCommentPair {
  std::string frame_id;   // "<video_id>:<frame_number>"
  std::string video_id;
  double timestamp_seconds = 0.0;
  std::string frame_path;
  std::string utterance_id;
  std::string utterance_text;
  std::vector<float> sentence_embedding;  // empty until attached, else 512
  std::vector<float> image_feature;       // empty or D_img
  Split split = Split::train;

  friend bool operator==(const FrameCommentPair&, const FrameCommentPair&) = default;
};

struct Dataset {
  std::vector<FrameCommentPair> pairs;
  std::uint64_t split_seed = 0;

  std::size_t count(Split s) const;
  std::vector<std::size_t> indices(Split s) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct AlignResult {
  std::vector<FrameCommentPair> pairs;
  std::size_t dropped = 0;
};

// Pairs each frame with the cue containing its timestamp; frames outside
// every cue go to the nearest cue within tolerance_seconds (ties to the
// earlier cue) or are dropped and counted.
AlignResult align(const std::vector<FrameFile>& frames,
                  const std::vector<TranscriptCue>& cues,
                  double tolerance_seconds, const std::string& video_id);

enum class SplitMode { random, chronological };

// Labels train_count pairs as train, the rest as test. Random mode permutes
// with the seed; chronological takes the earliest pairs by (video,
// timestamp). Deterministic per (dataset, seed).
void split_dataset(Dataset& dataset, std::size_t train_count,
                   std::uint64_t seed, SplitMode mode = SplitMode::random);

// The 3600/4840 train share used when no explicit count is requested.
std::size_t default_train_count(std::size_t total);

// Attaches sentence embeddings by utterance_id; every utterance must be
// covered exactly once or the offending id is reported.
void attach_embeddings(Dataset& dataset,
                       const std::map<std::string, text::SentenceEmbedding>& by_utterance);

// Attaches image-feature vectors by frame_id (training split must be fully
// covered before clustering; checked there).
void attach_image_features(Dataset& dataset,
                           const std::map<std::string, std::vector<float>>& by_frame);

void write_dataset(const Dataset& dataset, const std::string& path);
Dataset read_dataset(const std::string& path);

std::uint64_t dataset_fingerprint(const Dataset& dataset, Split split);

}  // namespace playcomm::data
