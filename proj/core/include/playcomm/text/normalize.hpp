#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "playcomm/hash.hpp"

namespace playcomm::text {

// Lowercases (ASCII), collapses whitespace runs and strips punctuation from
// token edges. Non-ASCII bytes pass through untouched.
inline std::string normalize(const std::string& raw) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    std::size_t b = 0, e = current.size();
    while (b < e && current[b] < 0x80 &&
           std::ispunct(static_cast<unsigned char>(current[b]))) {
      ++b;
    }
    while (e > b && current[e - 1] > 0 && current[e - 1] < 0x80 &&
           std::ispunct(static_cast<unsigned char>(current[e - 1]))) {
      --e;
    }
    if (e > b) tokens.push_back(current.substr(b, e - b));
    current.clear();
  };
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      current.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(c))));
    }
  }
  flush();
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

// Stable utterance identity: content hash of the normalized text plus the
// cue's first timestamp (millisecond resolution), so repeated wording at
// different times stays distinct while frames sharing one cue share one id.
inline std::string utterance_id(const std::string& normalized_text,
                                double start_seconds) {
  const std::int64_t millis =
      static_cast<std::int64_t>(start_seconds * 1000.0 + 0.5);
  std::uint64_t h = fnv1a64(normalized_text);
  h = fnv1a64("@", h);
  h = fnv1a64(std::to_string(millis), h);
  return hex64(h);
}

}  // namespace playcomm::text
