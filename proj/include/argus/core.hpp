#pragma once

#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "argus/errors.hpp"
#include "argus/text.hpp"

namespace argus {

// Classification the judge assigns to each hypothesis sentence.
enum class SentenceType { SUM, VD, DA };

// Entailment verdict against the premise caption.
enum class Verdict { EN, CON, UD };

// Scoring direction: H charges the model caption for unsupported content,
// O charges the human caption for content the model caption fails to cover.
enum class Direction { Hallucination, Omission };

inline char direction_letter(Direction d) { return d == Direction::Hallucination ? 'H' : 'O'; }

inline std::string direction_name(Direction d) {
  return d == Direction::Hallucination ? "hallucination" : "omission";
}

inline Direction parse_direction_letter(std::string_view s) {
  if (s == "H" || s == "h") return Direction::Hallucination;
  if (s == "O" || s == "o") return Direction::Omission;
  throw Error(Errc::SchemaError, "unknown direction '" + std::string(s) + "'");
}

// Long-form labels are the judge wire vocabulary; short names key report
// breakdowns.
inline std::string type_label(SentenceType t) {
  switch (t) {
    case SentenceType::SUM: return "summary";
    case SentenceType::VD: return "visual-description";
    case SentenceType::DA: return "dynamic-action";
  }
  return "";
}

inline std::string type_short_name(SentenceType t) {
  switch (t) {
    case SentenceType::SUM: return "SUM";
    case SentenceType::VD: return "VD";
    case SentenceType::DA: return "DA";
  }
  return "";
}

inline std::string verdict_label(Verdict v) {
  switch (v) {
    case Verdict::EN: return "entailment";
    case Verdict::CON: return "contradiction";
    case Verdict::UD: return "undetermined";
  }
  return "";
}

inline std::string verdict_short_name(Verdict v) {
  switch (v) {
    case Verdict::EN: return "EN";
    case Verdict::CON: return "CON";
    case Verdict::UD: return "UD";
  }
  return "";
}

namespace detail {
// Label comparison used for judge output: case-insensitive with '-', '_' and
// ' ' interchangeable, so "Visual Description" and "visual_description" both
// resolve.
inline std::string canonical_label(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : std::string(trim_view(s))) {
    if (c == '_' || c == ' ') c = '-';
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}
}  // namespace detail

inline SentenceType parse_sentence_type(std::string_view label) {
  std::string c = detail::canonical_label(label);
  if (c == "summary" || c == "sum") return SentenceType::SUM;
  if (c == "visual-description" || c == "vd") return SentenceType::VD;
  if (c == "dynamic-action" || c == "da") return SentenceType::DA;
  throw Error(Errc::UnknownLabel, "unknown sentence type '" + std::string(label) + "'");
}

inline Verdict parse_verdict(std::string_view label) {
  std::string c = detail::canonical_label(label);
  if (c == "entailment" || c == "entailed" || c == "en") return Verdict::EN;
  if (c == "contradiction" || c == "con") return Verdict::CON;
  if (c == "undetermined" || c == "ud") return Verdict::UD;
  throw Error(Errc::UnknownLabel, "unknown verdict '" + std::string(label) + "'");
}

// One caption sentence; index is 1-based position within its caption.
struct Sentence {
  int index = 0;
  std::string text;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

// A human/model caption pair for one video, already segmented.
struct CaptionPair {
  std::string video_id;
  std::string model_id;
  std::vector<Sentence> source;  // human reference sentences
  std::vector<Sentence> target;  // model caption sentences; may be empty
  std::map<std::string, std::string> metadata;
};

// Judge output for one hypothesis sentence, after evidence resolution.
// evidence_index is 1-based into the premise caption; nullopt when evidence
// was absent, out of range, or could not be matched to a unique sentence.
struct JudgedTarget {
  Sentence sentence;
  SentenceType stype = SentenceType::VD;
  Verdict verdict = Verdict::UD;
  std::optional<int> evidence_index;
  std::string evidence_text;
  std::string reasoning;
};

// A target participates in ordering (both the penalty pair count and the
// normalization term d) only when it is an entailed dynamic action whose
// evidence resolved to a premise sentence.
inline bool ordering_eligible(const JudgedTarget& t) {
  return t.verdict == Verdict::EN && t.stype == SentenceType::DA && t.evidence_index.has_value();
}

namespace detail {

inline const std::set<std::string>& abbreviation_set() {
  static const std::set<std::string> kAbbrev = {
      "e.g.", "i.e.", "etc.",  "mr.",     "mrs.", "ms.",   "dr.",  "prof.",
      "sr.",  "jr.",  "st.",   "vs.",     "cf.",  "fig.",  "no.",  "nos.",
      "vol.", "inc.", "dept.", "approx.", "al.",  "min.",  "sec.", "hr.",
  };
  return kAbbrev;
}

// Token ending at position i (inclusive), scanning back over alphanumerics
// and dots.  Lowercased so "Mr." and "mr." match the same entry.
inline std::string token_ending_at(std::string_view text, std::size_t i) {
  std::size_t b = i;
  while (b > 0) {
    unsigned char c = static_cast<unsigned char>(text[b - 1]);
    if (std::isalnum(c) || c == '.') --b;
    else break;
  }
  return to_lower(text.substr(b, i - b + 1));
}

}  // namespace detail

// Heuristic sentence splitter.  Boundaries are '.', '!' or '?' followed by
// whitespace (or end of text); runs like "?!" close at the run's last
// character; a '.' is suppressed when the token it ends is a known
// abbreviation ("e.g.", "Mr.", ...).  Text is treated as opaque bytes, so
// any UTF-8 passes through unmodified.
inline std::vector<Sentence> segment_caption(std::string_view text) {
  std::vector<Sentence> sentences;
  auto emit = [&sentences](std::string_view chunk) {
    std::string_view t = trim_view(chunk);
    if (!t.empty()) sentences.push_back({static_cast<int>(sentences.size()) + 1, std::string(t)});
  };

  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    bool at_end = (i + 1 == text.size());
    char next = at_end ? ' ' : text[i + 1];
    if (next == '.' || next == '!' || next == '?') continue;  // close at run end
    if (!at_end && !is_ascii_space(next)) continue;           // "3.5", "e.g" mid-word
    if (c == '.' && detail::abbreviation_set().count(detail::token_ending_at(text, i)))
      continue;
    emit(text.substr(start, i + 1 - start));
    start = i + 1;
  }
  if (start < text.size()) emit(text.substr(start));
  return sentences;
}

// Newline segmentation for captions that arrive pre-split: one sentence per
// non-empty line, trimmed (tolerates CRLF).
inline std::vector<Sentence> segment_lines(std::string_view text) {
  std::vector<Sentence> sentences;
  for (const std::string& line : split_lines(text)) {
    std::string_view t = trim_view(line);
    if (!t.empty()) sentences.push_back({static_cast<int>(sentences.size()) + 1, std::string(t)});
  }
  return sentences;
}

inline std::vector<Sentence> sentences_from_list(const std::vector<std::string>& lines) {
  std::vector<Sentence> sentences;
  for (const std::string& line : lines) {
    std::string_view t = trim_view(line);
    if (!t.empty()) sentences.push_back({static_cast<int>(sentences.size()) + 1, std::string(t)});
  }
  return sentences;
}

// Structural checks shared by every entry point that accepts a pair.
inline void validate_caption_pair(const CaptionPair& pair) {
  if (pair.video_id.empty()) throw Error(Errc::MissingId, "caption pair has empty video_id");
  if (pair.model_id.empty())
    throw Error(Errc::MissingId, "caption pair for '" + pair.video_id + "' has empty model_id");
  if (pair.source.empty())
    throw Error(Errc::EmptySource,
                "video '" + pair.video_id + "' has no reference sentences");
  for (std::size_t i = 0; i < pair.source.size(); ++i) {
    if (pair.source[i].index != static_cast<int>(i) + 1 || trim_view(pair.source[i].text).empty())
      throw Error(Errc::InconsistentInput,
                  "video '" + pair.video_id + "': bad source sentence at position " +
                      std::to_string(i + 1));
  }
  for (std::size_t i = 0; i < pair.target.size(); ++i) {
    if (pair.target[i].index != static_cast<int>(i) + 1 || trim_view(pair.target[i].text).empty())
      throw Error(Errc::InconsistentInput,
                  "video '" + pair.video_id + "': bad target sentence at position " +
                      std::to_string(i + 1));
  }
}

}  // namespace argus
