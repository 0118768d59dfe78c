#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "playcomm/tensor.hpp"

namespace playcomm::data {

struct FrameFile {
  std::size_t number = 0;  // 1-based index parsed from the filename
  double timestamp_seconds = 0.0;
  std::string path;
};

struct FrameSample {
  std::vector<FrameFile> frames;
  std::vector<std::string> warnings;  // numbering gaps and the like
};

// Scans a directory of sequentially numbered raster images (frame_0001.png,
// 17.jpg, ...) and assigns timestamps (number-1)/fps. Files whose header
// bytes are not a known raster signature are rejected with their filename.
FrameSample sample_frames(const std::string& dir, double fps = 1.0);

// Decodes, downscales to (height, width) and converts to an RGB float
// tensor [H,W,3] scaled to [0,1].
Tensor<float> decode_frame(const std::string& path, std::size_t height,
                           std::size_t width);

// Stacks decoded frames into one [N,H,W,3] batch.
Tensor<float> decode_frames(const std::vector<std::string>& paths,
                            std::size_t height, std::size_t width);

}  // namespace playcomm::data
