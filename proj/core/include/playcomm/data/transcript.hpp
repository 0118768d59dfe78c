#pragma once

#include <string>
#include <vector>

namespace playcomm::data {

struct TranscriptCue {
  double start_seconds = 0.0;
  double duration_seconds = 0.0;
  std::string text;

  double end_seconds() const { return start_seconds + duration_seconds; }

  friend bool operator==(const TranscriptCue&, const TranscriptCue&) = default;
};

// Parses the common web-caption cue shape:
//
//   HH:MM:SS.mmm --> HH:MM:SS.mmm
//   text lines...
//
// separated by blank lines. An optional leading "WEBVTT" header, cue
// numbers and cue settings after the timestamps are tolerated. Cues come
// back stably sorted by start time with empty-text cues dropped.
std::vector<TranscriptCue> parse_transcript(const std::string& path);
std::vector<TranscriptCue> parse_transcript_text(const std::string& content,
                                                 const std::string& origin);

}  // namespace playcomm::data
