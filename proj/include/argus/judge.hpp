#pragma once

#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "argus/core.hpp"
#include "argus/errors.hpp"
#include "argus/hash.hpp"
#include "argus/prompt_template.hpp"
#include "argus/text.hpp"

namespace argus {

// Endpoint prices per one million tokens.
struct TokenRates {
  double input_rate = 0.0;
  double output_rate = 0.0;
};

// Placeholder exemplar block substituted for {IN_CONTEXT_EXAMPLES}.  Replace
// with curated examples for production judging; verdicts can shift with
// different exemplars, so the prompt template id covers this block too.
inline constexpr const char* kDefaultInContextExamples = R"ICE(Example:

source_caption:
"""
1. A man enters the kitchen.
2. He chops onions on a wooden board.
"""

target_caption:
"""
1. A man chops onions.
2. He cries loudly.
"""

Expected output:
Line 1: A man chops onions.
    - Type: dynamic-action
    - Evidence: "He chops onions on a wooden board."
    - Reasoning: The source states the chopping action directly.
    - Verdict: entailment
Line 2: He cries loudly.
    - Type: visual-description
    - Evidence: ""
    - Reasoning: The source never mentions crying or any sound.
    - Verdict: undetermined)ICE";

struct JudgeConfig {
  std::string model_id = "gpt-4o";
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  int max_retries = 3;
  double backoff_base = 0.5;  // seconds; attempt k sleeps backoff_base * 2^k
  std::filesystem::path cache_dir = ".argus-cache";
  std::string in_context_examples = kDefaultInContextExamples;
  std::string prompt_template_id;  // explicit override; empty = derive from text

  std::string template_id() const {
    if (!prompt_template_id.empty()) return prompt_template_id;
    return content_hash({kJudgePromptTemplate, in_context_examples});
  }

  void validate() const {
    if (temperature < 0) throw Error(Errc::UsageError, "temperature must be >= 0");
    if (max_retries < 0) throw Error(Errc::UsageError, "max_retries must be >= 0");
    if (backoff_base < 0) throw Error(Errc::UsageError, "backoff_base must be >= 0");
  }
};

// Completion as it came back from the endpoint (or cache).
struct RawJudgeResponse {
  std::string text;
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
  std::string model_id;
  bool retrieved_from_cache = false;
};

// "1. first sentence\n2. second sentence": the caption rendering embedded
// in prompts and hashed into cache keys.
inline std::string render_numbered(std::span<const Sentence> sentences) {
  std::string out;
  for (const Sentence& s : sentences) {
    if (!out.empty()) out.push_back('\n');
    out += std::to_string(s.index);
    out += ". ";
    out += s.text;
  }
  return out;
}

inline std::string build_judge_prompt(std::span<const Sentence> source,
                                      std::span<const Sentence> target,
                                      const JudgeConfig& config) {
  if (source.empty()) throw Error(Errc::EmptySource, "prompt needs at least one premise sentence");
  if (target.empty())
    throw Error(Errc::EmptyTarget, "prompt needs at least one hypothesis sentence");
  std::string prompt = kJudgePromptTemplate;
  auto substitute = [&prompt](std::string_view placeholder, std::string_view value) {
    std::size_t pos = prompt.find(placeholder);
    if (pos == std::string::npos)
      throw Error(Errc::InconsistentInput,
                  "prompt template lost placeholder " + std::string(placeholder));
    prompt.replace(pos, placeholder.size(), value);
  };
  substitute("{IN_CONTEXT_EXAMPLES}", config.in_context_examples);
  substitute("{source_caption}", render_numbered(source));
  substitute("{target_caption}", render_numbered(target));
  return prompt;
}

// Stable identity of one judge call: any change to the pair, direction,
// judge settings, template or caption text moves the key.  The sanitized id
// prefix keeps cache directories and fixture names human-readable.
inline std::string cache_key(std::string_view video_id, std::string_view model_id,
                             Direction direction, const JudgeConfig& config,
                             std::string_view source_text, std::string_view target_text) {
  if (video_id.empty() || model_id.empty())
    throw Error(Errc::MissingId, "cache_key needs non-empty video and model ids");
  char temp[64];
  std::snprintf(temp, sizeof(temp), "%.17g", config.temperature);
  char letter[2] = {direction_letter(direction), '\0'};
  std::string digest = content_hash({video_id, model_id, std::string_view(letter, 1),
                                     config.model_id, temp, config.template_id(), source_text,
                                     target_text});
  return sanitize_id(video_id) + "__" + sanitize_id(model_id) + "__" + letter + "__" + digest;
}

namespace detail {

// Strips list bullets, surrounding bold markers and whitespace from the front
// of a response line: "  - **Type**: x" -> "Type**: x" -> handled by caller.
inline std::string_view strip_line_prefix(std::string_view line) {
  std::string_view s = trim_view(line);
  if (!s.empty() && (s.front() == '-' || s.front() == '*' || s.front() == '+')) {
    // distinguish a "* " bullet from "**bold**"
    if (s.size() >= 2 && s[0] == '*' && s[1] == '*') {
      s.remove_prefix(2);
    } else {
      s.remove_prefix(1);
    }
    s = trim_view(s);
  }
  if (s.size() >= 2 && s.substr(0, 2) == "**") s = trim_view(s.substr(2));
  return s;
}

// If the line starts with `name` (case-insensitive) followed by optional
// bold markers and a colon, returns the value after the colon.
inline std::optional<std::string> match_field(std::string_view line, std::string_view name) {
  std::string_view s = strip_line_prefix(line);
  if (!starts_with_ci(s, name)) return std::nullopt;
  s.remove_prefix(name.size());
  s = trim_view(s);
  if (s.size() >= 2 && s.substr(0, 2) == "**") s = trim_view(s.substr(2));
  if (s.empty() || s.front() != ':') return std::nullopt;
  s.remove_prefix(1);
  std::string value = trim(s);
  if (value.size() >= 4 && value.substr(0, 2) == "**" && value.substr(value.size() - 2) == "**")
    value = trim(value.substr(2, value.size() - 4));
  return value;
}

/// "Line 7: echoed text" -> 7.  Returns nullopt for anything else.
inline std::optional<int> match_block_start(std::string_view line) {
  std::string_view s = strip_line_prefix(line);
  if (!starts_with_ci(s, "line")) return std::nullopt;
  s.remove_prefix(4);
  s = trim_view(s);
  std::size_t digits = 0;
  long value = 0;
  while (digits < s.size() && s[digits] >= '0' && s[digits] <= '9') {
    value = value * 10 + (s[digits] - '0');
    ++digits;
  }
  if (digits == 0 || value <= 0 || value > 1000000) return std::nullopt;
  s.remove_prefix(digits);
  s = trim_view(s);
  if (s.empty() || s.front() != ':') return std::nullopt;
  return static_cast<int>(value);
}

inline std::string strip_one_quote_pair(std::string value) {
  if (value.size() >= 2) {
    char a = value.front(), b = value.back();
    if ((a == '"' && b == '"') || (a == '\'' && b == '\''))
      return value.substr(1, value.size() - 2);
  }
  return value;
}

}  // namespace detail

// Pulls the per-line Type/Evidence/Reasoning/Verdict blocks out of a judge
// completion.  Tolerates markdown dressing (bullets, bold field names, code
// fences) and wrapped reasoning lines; insists the blocks number exactly
// 1..n in order.  Evidence indices stay unresolved here.
inline std::vector<JudgedTarget> parse_judge_response(std::string_view text,
                                                      std::span<const Sentence> target) {
  enum class Slot { None, Type, Evidence, Reasoning, Verdict };
  struct Block {
    int number = 0;
    std::optional<std::string> type, evidence, reasoning, verdict;
    Slot last = Slot::None;

    std::optional<std::string>* slot(Slot s) {
      switch (s) {
        case Slot::Type: return &type;
        case Slot::Evidence: return &evidence;
        case Slot::Reasoning: return &reasoning;
        case Slot::Verdict: return &verdict;
        case Slot::None: break;
      }
      return nullptr;
    }
  };
  std::vector<Block> blocks;
  for (const std::string& raw_line : split_lines(text)) {
    std::string_view trimmed = trim_view(raw_line);
    if (trimmed.substr(0, 3) == "```") continue;
    if (auto num = detail::match_block_start(trimmed)) {
      Block b;
      b.number = *num;
      blocks.push_back(std::move(b));
      continue;
    }
    if (blocks.empty() || trimmed.empty()) continue;
    Block& b = blocks.back();
    auto take = [&b](Slot which, std::string value) {
      *b.slot(which) = std::move(value);
      b.last = which;
    };
    if (auto v = detail::match_field(trimmed, "type")) take(Slot::Type, *v);
    else if (auto v2 = detail::match_field(trimmed, "evidence")) take(Slot::Evidence, *v2);
    else if (auto v3 = detail::match_field(trimmed, "reasoning")) take(Slot::Reasoning, *v3);
    else if (auto v4 = detail::match_field(trimmed, "verdict")) take(Slot::Verdict, *v4);
    else if (b.last != Slot::None) {  // wrapped continuation of the previous field
      std::optional<std::string>& prev = *b.slot(b.last);
      prev->push_back(' ');
      prev->append(trimmed);
    }
  }

  const int n = static_cast<int>(target.size());
  if (static_cast<int>(blocks.size()) != n)
    throw Error(Errc::LineCountMismatch, "judge returned " + std::to_string(blocks.size()) +
                                             " line blocks for " + std::to_string(n) +
                                             " hypothesis sentences");
  std::vector<JudgedTarget> judged;
  judged.reserve(blocks.size());
  for (int i = 0; i < n; ++i) {
    const Block& b = blocks[static_cast<std::size_t>(i)];
    if (b.number != i + 1)
      throw Error(Errc::LineCountMismatch, "judge blocks numbered out of order: expected " +
                                               std::to_string(i + 1) + ", saw " +
                                               std::to_string(b.number));
    auto require = [&](const std::optional<std::string>& slot, const char* name) -> const std::string& {
      if (!slot)
        throw Error(Errc::MissingField,
                    std::string(name) + " missing in block for line " + std::to_string(b.number));
      return *slot;
    };
    JudgedTarget jt;
    jt.sentence = target[static_cast<std::size_t>(i)];
    jt.stype = parse_sentence_type(require(b.type, "Type"));
    jt.verdict = parse_verdict(require(b.verdict, "Verdict"));
    jt.evidence_text = detail::strip_one_quote_pair(require(b.evidence, "Evidence"));
    jt.reasoning = require(b.reasoning, "Reasoning");
    judged.push_back(std::move(jt));
  }
  return judged;
}

inline std::vector<JudgedTarget> parse_judge_response(const RawJudgeResponse& raw,
                                                      std::span<const Sentence> target) {
  if (raw.text.empty()) throw Error(Errc::MalformedEndpointReply, "empty judge completion");
  return parse_judge_response(std::string_view(raw.text), target);
}

namespace detail {
inline std::string single_line(std::string_view s) {
  std::string out(trim_view(s));
  for (char& c : out)
    if (c == '\n' || c == '\r') c = ' ';
  return out;
}
}  // namespace detail

// Emits judged targets in the exact block format parse_judge_response reads,
// for fixtures and audits.  parse(render(x)) preserves type, verdict,
// evidence text and reasoning.
inline std::string render_judged_targets(std::span<const JudgedTarget> judged) {
  std::string out;
  for (std::size_t i = 0; i < judged.size(); ++i) {
    const JudgedTarget& t = judged[i];
    out += "Line " + std::to_string(i + 1) + ": " + detail::single_line(t.sentence.text) + "\n";
    out += "    - Type: " + type_label(t.stype) + "\n";
    out += "    - Evidence: \"" + detail::single_line(t.evidence_text) + "\"\n";
    out += "    - Reasoning: " + detail::single_line(t.reasoning) + "\n";
    out += "    - Verdict: " + verdict_label(t.verdict) + "\n";
  }
  return out;
}

// Maps a judge's quoted evidence phrase to the premise sentence it cites.
// Cascade: exact substring, then case-folded punctuation-stripped
// containment, then token-set Jaccard >= 0.5; each stage must name exactly
// one sentence or resolution fails to null (guessing would manufacture
// ordering penalties).  A resolved sentence always shares at least one
// normalized token with the evidence.
inline std::optional<int> resolve_evidence(std::string_view evidence_text,
                                           std::span<const Sentence> source) {
  if (source.empty()) throw Error(Errc::EmptySource, "resolve_evidence needs premise sentences");
  std::string ev = trim(evidence_text);
  if (ev.empty()) return std::nullopt;
  std::vector<std::string> ev_tokens = tokenize_normalized(ev);
  if (ev_tokens.empty()) return std::nullopt;

  auto shares_token = [&ev_tokens](const Sentence& s) {
    std::vector<std::string> st = tokenize_normalized(s.text);
    for (const std::string& t : ev_tokens)
      if (std::find(st.begin(), st.end(), t) != st.end()) return true;
    return false;
  };
  auto unique_hit = [&source, &shares_token](auto&& pred) -> std::optional<std::optional<int>> {
    const Sentence* hit = nullptr;
    int count = 0;
    for (const Sentence& s : source) {
      if (pred(s)) {
        ++count;
        hit = &s;
      }
    }
    if (count == 1) {
      if (!shares_token(*hit)) return std::optional<int>{};  // pathological partial-word hit
      return std::optional<int>{hit->index};
    }
    if (count > 1) return std::optional<int>{};  // ambiguous: never guess
    return std::nullopt;                         // no hit: try the next stage
  };

  if (auto r = unique_hit([&ev](const Sentence& s) { return s.text.find(ev) != std::string::npos; }))
    return *r;

  std::string norm_ev = normalize_for_match(ev);
  if (!norm_ev.empty()) {
    if (auto r = unique_hit([&norm_ev](const Sentence& s) {
          return normalize_for_match(s.text).find(norm_ev) != std::string::npos;
        }))
      return *r;
  }

  std::set<std::string> ev_set(ev_tokens.begin(), ev_tokens.end());
  double best = 0.0;
  int best_index = 0;
  bool tie = false;
  for (const Sentence& s : source) {
    std::vector<std::string> st = tokenize_normalized(s.text);
    std::set<std::string> s_set(st.begin(), st.end());
    std::size_t inter = 0;
    for (const std::string& t : ev_set) inter += s_set.count(t);
    std::size_t uni = ev_set.size() + s_set.size() - inter;
    double j = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
    if (j > best) {
      best = j;
      best_index = s.index;
      tie = false;
    } else if (j == best && best > 0.0) {
      tie = true;
    }
  }
  if (best >= 0.5 && !tie) return best_index;
  return std::nullopt;
}

// Applies resolve_evidence to every judged target and validates the judged
// list against its premise.
inline void resolve_all_evidence(std::vector<JudgedTarget>& judged,
                                 std::span<const Sentence> source) {
  for (JudgedTarget& t : judged) t.evidence_index = resolve_evidence(t.evidence_text, source);
}

// Endpoint spend for one call; rates are per one million tokens.
inline double estimate_judge_cost(long long prompt_tokens, long long completion_tokens,
                                  TokenRates rates) {
  if (prompt_tokens < 0 || completion_tokens < 0)
    throw Error(Errc::InconsistentInput, "token counts must be >= 0");
  if (rates.input_rate < 0 || rates.output_rate < 0)
    throw Error(Errc::InconsistentInput, "token rates must be >= 0");
  return (static_cast<double>(prompt_tokens) * rates.input_rate +
          static_cast<double>(completion_tokens) * rates.output_rate) /
         1e6;
}

}  // namespace argus
