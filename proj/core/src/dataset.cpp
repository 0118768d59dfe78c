#include "playcomm/data/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "playcomm/errors.hpp"
#include "playcomm/hash.hpp"
#include "playcomm/rng.hpp"
#include "playcomm/text/normalize.hpp"

namespace playcomm::data {

std::size_t Dataset::count(Split s) const {
  std::size_t n = 0;
  for (const auto& p : pairs) {
    if (p.split == s) ++n;
  }
  return n;
}

std::vector<std::size_t> Dataset::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].split == s) out.push_back(i);
  }
  return out;
}

namespace {

// Distance from a timestamp to a cue interval; zero inside it.
double interval_distance(double t, const TranscriptCue& cue) {
  if (t < cue.start_seconds) return cue.start_seconds - t;
  if (t >= cue.end_seconds()) return t - cue.end_seconds();
  return 0.0;
}

}  // namespace

AlignResult align(const std::vector<FrameFile>& frames,
                  const std::vector<TranscriptCue>& cues,
                  double tolerance_seconds, const std::string& video_id) {
  if (frames.empty()) throw std::invalid_argument("align: no frames");
  if (cues.empty()) throw std::invalid_argument("align: no cues");
  if (tolerance_seconds < 0.0) {
    throw std::invalid_argument("align: tolerance must be nonnegative");
  }

  AlignResult out;
  for (const FrameFile& frame : frames) {
    const double t = frame.timestamp_seconds;
    std::size_t best = cues.size();
    double best_dist = 0.0;
    for (std::size_t i = 0; i < cues.size(); ++i) {
      const double d = interval_distance(t, cues[i]);
      if (best == cues.size() || d < best_dist) {
        best = i;
        best_dist = d;
        if (d == 0.0) break;  // containment; earlier cues win ties by scan order
      }
    }
    if (best == cues.size() || best_dist > tolerance_seconds) {
      ++out.dropped;
      continue;
    }
    const TranscriptCue& cue = cues[best];
    FrameCommentPair pair;
    pair.frame_id = video_id + ":" + std::to_string(frame.number);
    pair.video_id = video_id;
    pair.timestamp_seconds = t;
    pair.frame_path = frame.path;
    pair.utterance_text = cue.text;
    pair.utterance_id =
        text::utterance_id(text::normalize(cue.text), cue.start_seconds);
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

std::size_t default_train_count(std::size_t total) {
  if (total == 4840) return 3600;
  return static_cast<std::size_t>(
      std::llround(static_cast<double>(total) * 3600.0 / 4840.0));
}

void split_dataset(Dataset& dataset, std::size_t train_count,
                   std::uint64_t seed, SplitMode mode) {
  const std::size_t n = dataset.pairs.size();
  if (train_count > n) {
    throw std::invalid_argument("split: train count " + std::to_string(train_count) +
                                " exceeds dataset size " + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (mode == SplitMode::random) {
    Rng rng(derive_seed(seed, 0x5b117));
    rng.shuffle(order);
  } else {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& pa = dataset.pairs[a];
      const auto& pb = dataset.pairs[b];
      if (pa.video_id != pb.video_id) return pa.video_id < pb.video_id;
      return pa.timestamp_seconds < pb.timestamp_seconds;
    });
  }
  for (auto& p : dataset.pairs) p.split = Split::test;
  for (std::size_t i = 0; i < train_count; ++i) {
    dataset.pairs[order[i]].split = Split::train;
  }
  dataset.split_seed = seed;
}

void attach_embeddings(
    Dataset& dataset,
    const std::map<std::string, text::SentenceEmbedding>& by_utterance) {
  for (auto& p : dataset.pairs) {
    const auto it = by_utterance.find(p.utterance_id);
    if (it == by_utterance.end()) {
      throw InputError("attach_embeddings: no embedding for utterance " +
                       p.utterance_id + " (\"" + p.utterance_text + "\")");
    }
    if (it->second.vector.size() != text::kEmbeddingDim) {
      throw InputError("attach_embeddings: utterance " + p.utterance_id +
                       " has dimension " +
                       std::to_string(it->second.vector.size()));
    }
    p.sentence_embedding = it->second.vector;
  }
}

void attach_image_features(
    Dataset& dataset, const std::map<std::string, std::vector<float>>& by_frame) {
  std::size_t dim = 0;
  for (auto& p : dataset.pairs) {
    const auto it = by_frame.find(p.frame_id);
    if (it == by_frame.end()) continue;  // coverage is checked where required
    if (dim == 0) dim = it->second.size();
    if (it->second.size() != dim) {
      throw InputError("attach_image_features: frame " + p.frame_id +
                       " has dimension " + std::to_string(it->second.size()) +
                       ", expected " + std::to_string(dim));
    }
    p.image_feature = it->second;
  }
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape(const std::string& s, const std::string& where) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out.push_back(s[i]);
      continue;
    }
    if (i + 1 >= s.size()) throw InputError(where + ": dangling escape");
    switch (s[++i]) {
      case '\\': out.push_back('\\'); break;
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      default: throw InputError(where + ": unknown escape \\" + s[i]);
    }
  }
  return out;
}

std::string float_list(const std::vector<float>& v) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v[i]));
    if (i) out.push_back(',');
    out += buf;
  }
  return out;
}

std::vector<float> parse_float_list(const std::string& s, const std::string& where) {
  std::vector<float> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    float v = 0.0f;
    const char* begin = s.data() + pos;
    const char* end = s.data() + next;
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
      throw InputError(where + ": malformed numeric list");
    }
    if (!std::isfinite(v)) throw InputError(where + ": non-finite value");
    out.push_back(v);
    pos = next + 1;
  }
  return out;
}

constexpr const char* kDatasetHeader = "#playcomm-dataset v1";

}  // namespace

void write_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("write_dataset: cannot open " + path);
  out << kDatasetHeader << '\n';
  out << "#fields frame_id video_id timestamp frame_path utt_id utt_text split"
         " [emb] [imgfeat]\n";
  out << "#split_seed " << dataset.split_seed << '\n';
  char ts[64];
  for (const auto& p : dataset.pairs) {
    std::snprintf(ts, sizeof(ts), "%.17g", p.timestamp_seconds);
    out << "frame_id=" << escape(p.frame_id)
        << "\tvideo_id=" << escape(p.video_id)
        << "\ttimestamp=" << ts
        << "\tframe_path=" << escape(p.frame_path)
        << "\tutt_id=" << p.utterance_id
        << "\tutt_text=" << escape(p.utterance_text)
        << "\tsplit=" << (p.split == Split::train ? "train" : "test");
    if (!p.sentence_embedding.empty()) {
      out << "\temb=" << float_list(p.sentence_embedding);
    }
    if (!p.image_feature.empty()) {
      out << "\timgfeat=" << float_list(p.image_feature);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_dataset: write failed for " + path);
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("read_dataset: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty dataset file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kDatasetHeader) {
    throw InputError(path + ": not a playcomm dataset file (bad header)");
  }

  Dataset ds;
  std::size_t record_index = 0;
  std::size_t imgfeat_dim = 0;
  std::map<std::string, std::string> utterance_texts;
  std::map<std::string, bool> seen_frames;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("#split_seed ", 0) == 0) {
        ds.split_seed = std::stoull(line.substr(12));
      }
      continue;
    }
    const std::string where = path + ": record " + std::to_string(record_index);

    FrameCommentPair p;
    bool have_frame_id = false, have_video = false, have_ts = false,
         have_path = false, have_uid = false, have_text = false,
         have_split = false;

    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t next = line.find('\t', pos);
      if (next == std::string::npos) next = line.size();
      const std::string field = line.substr(pos, next - pos);
      pos = next + 1;
      const std::size_t eq = field.find('=');
      if (eq == std::string::npos) {
        throw InputError(where + ": field without '=': " + field);
      }
      const std::string key = field.substr(0, eq);
      const std::string value = field.substr(eq + 1);
      if (key == "frame_id") {
        p.frame_id = unescape(value, where);
        have_frame_id = true;
      } else if (key == "video_id") {
        p.video_id = unescape(value, where);
        have_video = true;
      } else if (key == "timestamp") {
        p.timestamp_seconds = std::stod(value);
        have_ts = true;
      } else if (key == "frame_path") {
        p.frame_path = unescape(value, where);
        have_path = true;
      } else if (key == "utt_id") {
        p.utterance_id = value;
        have_uid = true;
      } else if (key == "utt_text") {
        p.utterance_text = unescape(value, where);
        have_text = true;
      } else if (key == "split") {
        if (value == "train") {
          p.split = Split::train;
        } else if (value == "test") {
          p.split = Split::test;
        } else {
          throw InputError(where + ": unknown split '" + value + "'");
        }
        have_split = true;
      } else if (key == "emb") {
        p.sentence_embedding = parse_float_list(value, where);
        if (p.sentence_embedding.size() != text::kEmbeddingDim) {
          throw InputError(where + ": embedding has length " +
                           std::to_string(p.sentence_embedding.size()) +
                           ", expected " + std::to_string(text::kEmbeddingDim));
        }
      } else if (key == "imgfeat") {
        p.image_feature = parse_float_list(value, where);
        if (imgfeat_dim == 0) imgfeat_dim = p.image_feature.size();
        if (p.image_feature.size() != imgfeat_dim) {
          throw InputError(where + ": image feature has length " +
                           std::to_string(p.image_feature.size()) +
                           ", expected " + std::to_string(imgfeat_dim));
        }
      } else {
        throw InputError(where + ": unknown field '" + key + "'");
      }
    }

    if (!have_frame_id || !have_video || !have_ts || !have_path || !have_uid ||
        !have_text || !have_split) {
      throw InputError(where + ": missing required field");
    }
    if (seen_frames.contains(p.frame_id)) {
      throw InputError(where + ": duplicate frame_id " + p.frame_id);
    }
    seen_frames[p.frame_id] = true;
    const auto it = utterance_texts.find(p.utterance_id);
    if (it == utterance_texts.end()) {
      utterance_texts.emplace(p.utterance_id, p.utterance_text);
    } else if (it->second != p.utterance_text) {
      throw InputError(where + ": utterance " + p.utterance_id +
                       " maps to two different texts");
    }
    ds.pairs.push_back(std::move(p));
    ++record_index;
  }
  return ds;
}

std::uint64_t dataset_fingerprint(const Dataset& dataset, Split split) {
  std::uint64_t h = kFnvOffset;
  for (const auto& p : dataset.pairs) {
    if (p.split != split) continue;
    h = fnv1a64(p.frame_id, h);
    h = fnv1a64("|", h);
    h = fnv1a64(p.utterance_id, h);
    h = fnv1a64(";", h);
  }
  return h;
}

}  // namespace playcomm::data
