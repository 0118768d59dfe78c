#include "playcomm/data/transcript.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>

#include "playcomm/errors.hpp"

namespace playcomm::data {

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

// "HH:MM:SS.mmm" or "MM:SS.mmm"; the fraction is optional and ',' is
// accepted as the decimal separator (SRT-style exports).
std::optional<double> parse_timestamp(std::string token) {
  for (char& c : token) {
    if (c == ',') c = '.';
  }
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= token.size()) {
    std::size_t next = token.find(':', pos);
    if (next == std::string::npos) next = token.size();
    parts.push_back(token.substr(pos, next - pos));
    pos = next + 1;
  }
  if (parts.size() < 2 || parts.size() > 3) return std::nullopt;

  double seconds = 0.0;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!all_digits(parts[i])) return std::nullopt;
    seconds = seconds * 60.0 + std::stod(parts[i]);
  }
  const std::string& last = parts.back();
  if (last.empty()) return std::nullopt;
  std::size_t dot = last.find('.');
  const std::string whole = dot == std::string::npos ? last : last.substr(0, dot);
  if (!all_digits(whole)) return std::nullopt;
  double frac = 0.0;
  if (dot != std::string::npos) {
    const std::string frac_str = last.substr(dot + 1);
    if (!all_digits(frac_str)) return std::nullopt;
    frac = std::stod("0." + frac_str);
  }
  return seconds * 60.0 + std::stod(whole) + frac;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::vector<TranscriptCue> parse_transcript_text(const std::string& content,
                                                 const std::string& origin) {
  std::vector<TranscriptCue> cues;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;

  std::optional<TranscriptCue> current;
  std::vector<std::string> text_lines;

  auto flush = [&] {
    if (!current) return;
    std::string joined;
    for (const auto& t : text_lines) {
      if (!joined.empty()) joined += ' ';
      joined += t;
    }
    current->text = joined;
    if (!current->text.empty()) cues.push_back(*current);
    current.reset();
    text_lines.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string trimmed = trim(line);

    if (trimmed.empty()) {
      flush();
      continue;
    }
    if (line_no == 1 && trimmed.rfind("WEBVTT", 0) == 0) continue;

    const std::size_t arrow = trimmed.find("-->");
    if (arrow != std::string::npos) {
      flush();
      const std::string lhs = trim(trimmed.substr(0, arrow));
      std::string rhs = trim(trimmed.substr(arrow + 3));
      // Drop cue settings after the end timestamp.
      const std::size_t space = rhs.find(' ');
      if (space != std::string::npos) rhs = rhs.substr(0, space);

      const auto start = parse_timestamp(lhs);
      const auto end = parse_timestamp(rhs);
      if (!start || !end) {
        throw InputError(origin + ":" + std::to_string(line_no) +
                         ": malformed cue timestamp '" + trimmed + "'");
      }
      if (!(*end > *start)) {
        throw InputError(origin + ":" + std::to_string(line_no) +
                         ": cue duration must be positive");
      }
      current = TranscriptCue{*start, *end - *start, ""};
      continue;
    }

    if (current) {
      text_lines.push_back(trimmed);
    }
    // Lines before any cue header (identifiers, notes) are skipped.
  }
  flush();

  std::stable_sort(cues.begin(), cues.end(),
                   [](const TranscriptCue& a, const TranscriptCue& b) {
                     return a.start_seconds < b.start_seconds;
                   });
  return cues;
}

std::vector<TranscriptCue> parse_transcript(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open transcript " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_transcript_text(buf.str(), path);
}

}  // namespace playcomm::data
