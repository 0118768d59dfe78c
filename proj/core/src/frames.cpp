#include "playcomm/data/frames.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "playcomm/errors.hpp"

namespace fs = std::filesystem;

namespace playcomm::data {

namespace {

bool raster_extension(std::string ext) {
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" ||
         ext == ".ppm" || ext == ".pgm";
}

// Trailing integer in the stem: "frame_0017" -> 17.
std::optional<std::size_t> trailing_number(const std::string& stem) {
  std::size_t end = stem.size();
  std::size_t begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) {
    --begin;
  }
  if (begin == end) return std::nullopt;
  return std::stoull(stem.substr(begin, end - begin));
}

bool known_raster_signature(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  unsigned char sig[8] = {};
  in.read(reinterpret_cast<char*>(sig), sizeof(sig));
  if (in.gcount() < 2) return false;
  static const unsigned char png[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  if (in.gcount() >= 8 && std::equal(sig, sig + 8, png)) return true;
  if (sig[0] == 0xff && sig[1] == 0xd8) return true;                  // JPEG
  if (sig[0] == 'B' && sig[1] == 'M') return true;                    // BMP
  if (sig[0] == 'P' && sig[1] >= '1' && sig[1] <= '6') return true;   // PNM
  return false;
}

}  // namespace

FrameSample sample_frames(const std::string& dir, double fps) {
  if (!(fps > 0.0)) {
    throw std::invalid_argument("sample_frames: fps must be positive");
  }
  if (!fs::is_directory(dir)) {
    throw InputError("sample_frames: not a directory: " + dir);
  }

  FrameSample out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (!raster_extension(p.extension().string())) continue;
    const auto number = trailing_number(p.stem().string());
    if (!number) continue;
    if (*number == 0) {
      throw InputError("sample_frames: frame numbering is 1-based, got " +
                       p.string());
    }
    if (!known_raster_signature(p.string())) {
      throw InputError("sample_frames: unreadable image " + p.string());
    }
    FrameFile f;
    f.number = *number;
    f.timestamp_seconds = static_cast<double>(*number - 1) / fps;
    f.path = p.string();
    out.frames.push_back(std::move(f));
  }

  std::sort(out.frames.begin(), out.frames.end(),
            [](const FrameFile& a, const FrameFile& b) {
              return a.number < b.number;
            });
  for (std::size_t i = 1; i < out.frames.size(); ++i) {
    if (out.frames[i].number == out.frames[i - 1].number) {
      throw InputError("sample_frames: duplicate frame number " +
                       std::to_string(out.frames[i].number) + " in " + dir);
    }
    if (out.frames[i].number != out.frames[i - 1].number + 1) {
      out.warnings.push_back("gap in frame numbering between " +
                             std::to_string(out.frames[i - 1].number) + " and " +
                             std::to_string(out.frames[i].number) + " in " + dir);
    }
  }
  return out;
}

Tensor<float> decode_frame(const std::string& path, std::size_t height,
                           std::size_t width) {
  cv::Mat img = cv::imread(path, cv::IMREAD_COLOR);
  if (img.empty()) {
    throw InputError("decode_frame: cannot decode image " + path);
  }
  cv::Mat resized;
  if (img.rows == static_cast<int>(height) && img.cols == static_cast<int>(width)) {
    resized = img;
  } else {
    cv::resize(img, resized, cv::Size(static_cast<int>(width),
                                      static_cast<int>(height)),
               0, 0, cv::INTER_AREA);
  }

  Tensor<float> out({height, width, 3});
  constexpr float kInv255 = 1.0f / 255.0f;
  for (std::size_t y = 0; y < height; ++y) {
    const cv::Vec3b* row = resized.ptr<cv::Vec3b>(static_cast<int>(y));
    for (std::size_t x = 0; x < width; ++x) {
      const cv::Vec3b& bgr = row[x];
      float* dst = out.data() + (y * width + x) * 3;
      dst[0] = static_cast<float>(bgr[2]) * kInv255;
      dst[1] = static_cast<float>(bgr[1]) * kInv255;
      dst[2] = static_cast<float>(bgr[0]) * kInv255;
    }
  }
  return out;
}

Tensor<float> decode_frames(const std::vector<std::string>& paths,
                            std::size_t height, std::size_t width) {
  if (paths.empty()) {
    throw std::invalid_argument("decode_frames: no paths given");
  }
  Tensor<float> out({paths.size(), height, width, 3});
  const std::size_t stride = height * width * 3;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    Tensor<float> one = decode_frame(paths[i], height, width);
    std::copy(one.data(), one.data() + stride, out.data() + i * stride);
  }
  return out;
}

}  // namespace playcomm::data
