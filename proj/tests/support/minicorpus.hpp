#pragma once

// Synthetic three-"video" corpus for pipeline tests: PPM frames with one
// visual theme per video, generated web-caption transcripts drawing on
// per-theme vocabulary, and block-mean image features. Everything is a
// deterministic function of the seed.

#include <cstdint>
#include <string>
#include <vector>

#include "playcomm/data/dataset.hpp"

namespace testsupport {

struct MiniCorpus {
  std::string root;
  std::string frames_dir;       // root/frames/<video_id>/<n>.ppm
  std::string transcripts_dir;  // root/transcripts/<video_id>.vtt
  std::string features_path;    // root/features.tsv (frame_id -> 48-d vector)
  std::vector<std::string> video_ids;
  std::size_t frames_per_video = 0;
};

MiniCorpus make_minicorpus(const std::string& base_dir, std::uint64_t seed,
                           std::size_t videos = 3,
                           std::size_t frames_per_video = 100);

// Binary P6 PPM writer; rgb is row-major interleaved.
void write_ppm(const std::string& path, std::size_t width, std::size_t height,
               const std::vector<std::uint8_t>& rgb);

// In-memory ingest of one corpus video (or all of them with video_index ==
// npos): sample, parse, align, split, fallback-embed, optionally attach the
// generated image features.
playcomm::data::Dataset ingest_corpus(const MiniCorpus& corpus,
                                      std::size_t video_index,
                                      std::size_t train_count,
                                      std::uint64_t seed,
                                      bool attach_features = false);

}  // namespace testsupport
