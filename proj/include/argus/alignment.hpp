#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "argus/core.hpp"
#include "argus/errors.hpp"

namespace argus {

// Ordering weight as an exact decimal rational (num / den, den a power of
// ten).  Costs are scored on 64-bit integer keys scaled by den, so equal
// costs compare equal and tie-breaking is deterministic; doubles appear only
// in reported values.
struct Lambda {
  std::int64_t num = 1;
  std::int64_t den = 10;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  static Lambda zero() { return Lambda{0, 1}; }

  // Accepts plain decimal strings in [0, 1] with at most nine fraction
  // digits: "0", "1", "0.1", ".25".
  static Lambda parse(std::string_view text) {
    std::string_view whole = text, frac;
    if (std::size_t dot = text.find('.'); dot != std::string_view::npos) {
      whole = text.substr(0, dot);
      frac = text.substr(dot + 1);
    }
    auto digits_only = [](std::string_view s) {
      return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if ((whole.empty() && frac.empty()) || !digits_only(whole) || !digits_only(frac))
      throw Error(Errc::UsageError, "lambda '" + std::string(text) + "' is not a number");
    if (frac.size() > 9)
      throw Error(Errc::UsageError, "lambda supports at most 9 fraction digits");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    std::int64_t whole_v = 0;
    for (char c : whole) whole_v = whole_v * 10 + (c - '0');
    if (whole_v > 1) throw Error(Errc::UsageError, "lambda must be at most 1");
    std::int64_t frac_v = 0;
    for (char c : frac) frac_v = frac_v * 10 + (c - '0');
    std::int64_t num = whole_v * den + frac_v;
    if (num > den) throw Error(Errc::UsageError, "lambda must be at most 1");
    return Lambda{num, den};
  }
};

// Base cost matrix (one row per hypothesis sentence, one column per premise
// sentence), entries in {0, 1}.
struct CostMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> cells;  // row-major

  std::uint8_t at(int i, int j) const {  // 1-based
    return cells[static_cast<std::size_t>(i - 1) * cols + (j - 1)];
  }
};

// A hypothesis sentence costs 0 against premise sentence j when its verdict
// is entailment and either (a) it is a summary or visual description, so any
// column supports it, or (b) it is a dynamic action whose resolved evidence
// is exactly column j.  Everything else (contradiction, undetermined, or an
// entailed dynamic action with unresolved evidence) costs 1 in every column.
inline CostMatrix build_base_cost_matrix(std::span<const JudgedTarget> judged, int source_count) {
  if (source_count < 1) throw Error(Errc::EmptySource, "cost matrix needs at least one column");
  CostMatrix mat;
  mat.rows = static_cast<int>(judged.size());
  mat.cols = source_count;
  mat.cells.assign(static_cast<std::size_t>(mat.rows) * mat.cols, 1);
  for (int i = 0; i < mat.rows; ++i) {
    const JudgedTarget& t = judged[static_cast<std::size_t>(i)];
    if (t.evidence_index && (*t.evidence_index < 1 || *t.evidence_index > source_count))
      throw Error(Errc::EvidenceOutOfRange,
                  "target " + std::to_string(i + 1) + " cites premise sentence " +
                      std::to_string(*t.evidence_index) + " of " + std::to_string(source_count));
    if (t.verdict != Verdict::EN) continue;
    auto* row = mat.cells.data() + static_cast<std::size_t>(i) * mat.cols;
    if (t.stype != SentenceType::DA) {
      std::fill(row, row + mat.cols, std::uint8_t{0});
    } else if (t.evidence_index) {
      row[*t.evidence_index - 1] = 0;
    }
  }
  return mat;
}

// One already-aligned target, as seen by the ordering penalty.
struct HistoryEntry {
  int assigned = 0;  // premise sentence the target was aligned to (1-based)
  SentenceType stype = SentenceType::VD;
  Verdict verdict = Verdict::UD;
};

// Penalty for appending an ordering-constrained target at premise column j:
// lambda per already-aligned entailed dynamic action sitting at a later
// premise sentence than j.  Only meaningful when the appended target is
// itself an entailed dynamic action; the alignment search applies it under
// that condition.
inline double ordering_penalty(std::span<const HistoryEntry> history, int candidate_j,
                               Lambda lambda) {
  std::int64_t hits = 0;
  for (const HistoryEntry& h : history) {
    if (h.verdict == Verdict::EN && h.stype == SentenceType::DA && h.assigned > candidate_j)
      ++hits;
  }
  return static_cast<double>(hits * lambda.num) / static_cast<double>(lambda.den);
}

// Result of scoring one judged hypothesis list against a premise caption.
struct AlignmentOutcome {
  std::vector<int> assignment;    // chosen premise column per hypothesis sentence
  std::int64_t base_units = 0;    // number of cost-1 cells on the chosen path
  std::int64_t penalty_pairs = 0; // out-of-order pairs among ordering targets
  double base_cost = 0.0;
  double order_penalty = 0.0;
  double raw_total = 0.0;
  int n = 0;  // hypothesis sentence count
  int m = 0;  // premise sentence count
  int d = 0;  // ordering-eligible hypothesis count
  double normalized = 0.0;
  bool degenerate = false;
  Lambda lambda;
  Direction direction = Direction::Hallucination;
};

// Worst achievable raw cost for n targets of which d are ordering-eligible:
// every non-eligible target costs its row of ones, and the eligible ones pay
// the ordering weight on every pair.
inline double max_possible_cost(int n, int d, Lambda lambda) {
  if (d < 0 || n < 0 || d > n)
    throw Error(Errc::InconsistentInput,
                "max_possible_cost needs 0 <= d <= n, got n=" + std::to_string(n) +
                    " d=" + std::to_string(d));
  double pairs = static_cast<double>(d) * (d - 1) / 2.0;
  return static_cast<double>(n - d) + lambda.value() * pairs;
}

struct NormalizedCost {
  double value = 0.0;
  bool degenerate = false;
};

// Scale a raw cost to [0, 100] of the worst achievable cost.  A zero
// denominator (no hypothesis sentences, or a single ordering-eligible one)
// yields 0 with the degenerate flag set; a positive raw cost with a zero
// denominator is contradictory input.
inline NormalizedCost normalize_cost(double raw_total, int n, int d, Lambda lambda) {
  double denom = max_possible_cost(n, d, lambda);
  if (denom == 0.0) {
    if (raw_total != 0.0)
      throw Error(Errc::InconsistentInput, "positive raw cost with zero-cost ceiling");
    return {0.0, true};
  }
  return {100.0 * raw_total / denom, false};
}

namespace detail {

inline std::int64_t checked_key_bound(int n, Lambda lambda) {
  long double worst = static_cast<long double>(n) * lambda.den +
                      static_cast<long double>(n) * n * lambda.num / 2.0L;
  if (worst > 4.0e18L)
    throw Error(Errc::InstanceTooLarge, "alignment cost exceeds exact integer range");
  return static_cast<std::int64_t>(worst) + 1;
}

inline void finish_outcome(AlignmentOutcome& out, const CostMatrix& mat,
                           std::span<const JudgedTarget> judged, Lambda lambda) {
  out.base_units = 0;
  out.penalty_pairs = 0;
  std::vector<int> eligible_cols;
  for (int i = 1; i <= out.n; ++i) {
    int j = out.assignment[static_cast<std::size_t>(i - 1)];
    out.base_units += mat.at(i, j);
    if (ordering_eligible(judged[static_cast<std::size_t>(i - 1)])) {
      for (int prior : eligible_cols)
        if (prior > j) ++out.penalty_pairs;
      eligible_cols.push_back(j);
    }
  }
  out.d = static_cast<int>(eligible_cols.size());
  out.base_cost = static_cast<double>(out.base_units);
  out.order_penalty =
      static_cast<double>(out.penalty_pairs * lambda.num) / static_cast<double>(lambda.den);
  out.raw_total = out.base_cost + out.order_penalty;
  out.lambda = lambda;

  std::int64_t raw_key = out.base_units * lambda.den + out.penalty_pairs * lambda.num;
  std::int64_t pair_count = static_cast<std::int64_t>(out.d) * (out.d - 1) / 2;
  std::int64_t denom_key =
      static_cast<std::int64_t>(out.n - out.d) * lambda.den + pair_count * lambda.num;
  if (denom_key == 0) {
    out.normalized = 0.0;
    out.degenerate = true;
  } else {
    out.normalized = (100.0 * static_cast<double>(raw_key)) / static_cast<double>(denom_key);
    out.degenerate = false;
  }
}

}  // namespace detail

// Sequential alignment search.  State (i, j) is "target i aligned to premise
// column j"; each state keeps the single cheapest history via a back-pointer
// to the chosen predecessor column (smallest column on ties).  The ordering
// penalty for appending an eligible target at column j is charged against
// that stored history, so the search is a heuristic over the full
// exponential assignment space: its cost is always achievable (every state
// path is a genuine assignment) but not guaranteed minimal once two or more
// ordering-eligible targets interact.
inline AlignmentOutcome run_alignment_dp(std::span<const JudgedTarget> judged, int source_count,
                                         Lambda lambda) {
  AlignmentOutcome out;
  out.n = static_cast<int>(judged.size());
  out.m = source_count;
  out.lambda = lambda;
  if (out.n == 0) {
    if (source_count < 1)
      throw Error(Errc::EmptySource, "alignment needs at least one premise sentence");
    out.normalized = 0.0;
    out.degenerate = true;
    return out;
  }
  CostMatrix mat = build_base_cost_matrix(judged, source_count);
  detail::checked_key_bound(out.n, lambda);

  const int n = out.n, m = out.m;
  std::vector<bool> eligible(static_cast<std::size_t>(n) + 1, false);
  for (int i = 1; i <= n; ++i)
    eligible[static_cast<std::size_t>(i)] = ordering_eligible(judged[static_cast<std::size_t>(i - 1)]);

  // bp[i][j] = predecessor column chosen for state (i, j); flat (n+1) x (m+1).
  std::vector<std::int32_t> bp(static_cast<std::size_t>(n + 1) * (m + 1), 0);
  auto bp_at = [&bp, m](int i, int j) -> std::int32_t& {
    return bp[static_cast<std::size_t>(i) * (m + 1) + j];
  };

  std::vector<std::int64_t> prev(static_cast<std::size_t>(m) + 1, 0);
  std::vector<std::int64_t> cur(static_cast<std::size_t>(m) + 1, 0);
  std::vector<std::int64_t> suffix_gt(static_cast<std::size_t>(m) + 1, 0);
  std::vector<int> freq(static_cast<std::size_t>(m) + 2, 0);

  for (int i = 1; i <= n; ++i) {
    if (i == 1) {
      for (int j = 1; j <= m; ++j) {
        cur[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(mat.at(1, j)) * lambda.den;
        bp_at(1, j) = 0;
      }
    } else if (!eligible[static_cast<std::size_t>(i)]) {
      // No ordering charge: every state extends the cheapest predecessor.
      int best_k = 1;
      for (int k = 2; k <= m; ++k)
        if (prev[static_cast<std::size_t>(k)] < prev[static_cast<std::size_t>(best_k)]) best_k = k;
      std::int64_t base = prev[static_cast<std::size_t>(best_k)];
      for (int j = 1; j <= m; ++j) {
        cur[static_cast<std::size_t>(j)] =
            base + static_cast<std::int64_t>(mat.at(i, j)) * lambda.den;
        bp_at(i, j) = static_cast<std::int32_t>(best_k);
      }
    } else {
      for (int j = 1; j <= m; ++j) cur[static_cast<std::size_t>(j)] = -1;
      for (int k = 1; k <= m; ++k) {
        // Count, per candidate column j, the eligible entries of the history
        // stored at state (i-1, k) that sit past j.
        std::fill(freq.begin(), freq.end(), 0);
        int row = i - 1, col = k;
        while (row >= 1) {
          if (eligible[static_cast<std::size_t>(row)]) ++freq[static_cast<std::size_t>(col)];
          col = bp_at(row, col);
          --row;
        }
        suffix_gt[static_cast<std::size_t>(m)] = 0;
        for (int j = m - 1; j >= 1; --j)
          suffix_gt[static_cast<std::size_t>(j)] =
              suffix_gt[static_cast<std::size_t>(j + 1)] + freq[static_cast<std::size_t>(j + 1)];
        for (int j = 1; j <= m; ++j) {
          std::int64_t cand = prev[static_cast<std::size_t>(k)] +
                              suffix_gt[static_cast<std::size_t>(j)] * lambda.num;
          if (cur[static_cast<std::size_t>(j)] < 0 || cand < cur[static_cast<std::size_t>(j)]) {
            cur[static_cast<std::size_t>(j)] = cand;
            bp_at(i, j) = static_cast<std::int32_t>(k);
          }
        }
      }
      for (int j = 1; j <= m; ++j)
        cur[static_cast<std::size_t>(j)] += static_cast<std::int64_t>(mat.at(i, j)) * lambda.den;
    }
    std::swap(prev, cur);
  }

  int best_j = 1;
  for (int j = 2; j <= m; ++j)
    if (prev[static_cast<std::size_t>(j)] < prev[static_cast<std::size_t>(best_j)]) best_j = j;

  out.assignment.assign(static_cast<std::size_t>(n), 0);
  int col = best_j;
  for (int i = n; i >= 1; --i) {
    out.assignment[static_cast<std::size_t>(i - 1)] = col;
    col = bp_at(i, col);
  }
  detail::finish_outcome(out, mat, judged, lambda);
  std::int64_t raw_key = out.base_units * lambda.den + out.penalty_pairs * lambda.num;
  if (raw_key != prev[static_cast<std::size_t>(best_j)])
    throw Error(Errc::InconsistentInput, "alignment bookkeeping mismatch");
  return out;
}

// Exhaustive minimum over all m^n assignments, in lexicographic order with
// strictly-smaller acceptance, so ties resolve to the lexicographically
// smallest assignment.  Refuses instances above max_states leaves.
inline AlignmentOutcome brute_force_alignment(std::span<const JudgedTarget> judged,
                                              int source_count, Lambda lambda,
                                              std::uint64_t max_states = 1000000) {
  AlignmentOutcome out;
  out.n = static_cast<int>(judged.size());
  out.m = source_count;
  out.lambda = lambda;
  if (out.n == 0) {
    if (source_count < 1)
      throw Error(Errc::EmptySource, "alignment needs at least one premise sentence");
    out.normalized = 0.0;
    out.degenerate = true;
    return out;
  }
  const int n = out.n, m = out.m;
  double leaves = 1.0;
  for (int i = 0; i < n; ++i) {
    leaves *= m;
    if (leaves > static_cast<double>(max_states))
      throw Error(Errc::InstanceTooLarge,
                  "assignment space " + std::to_string(m) + "^" + std::to_string(n) +
                      " exceeds " + std::to_string(max_states) + " states");
  }
  CostMatrix mat = build_base_cost_matrix(judged, source_count);
  detail::checked_key_bound(n, lambda);

  std::vector<bool> eligible(static_cast<std::size_t>(n) + 1, false);
  for (int i = 1; i <= n; ++i)
    eligible[static_cast<std::size_t>(i)] = ordering_eligible(judged[static_cast<std::size_t>(i - 1)]);

  std::vector<int> pick(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> placed;  // eligible columns placed so far, in depth order
  placed.reserve(static_cast<std::size_t>(n));
  std::int64_t best = -1;
  std::vector<int> best_a;

  auto dfs = [&](auto&& self, int depth, std::int64_t acc) -> void {
    if (depth > n) {
      if (best < 0 || acc < best) {  // strict: first minimum in lex order wins
        best = acc;
        best_a.assign(pick.begin() + 1, pick.end());
      }
      return;
    }
    bool elig = eligible[static_cast<std::size_t>(depth)];
    for (int j = 1; j <= m; ++j) {
      std::int64_t inc = static_cast<std::int64_t>(mat.at(depth, j)) * lambda.den;
      if (elig) {
        std::int64_t gt = 0;
        for (int prior : placed)
          if (prior > j) ++gt;
        inc += gt * lambda.num;
        placed.push_back(j);
      }
      pick[static_cast<std::size_t>(depth)] = j;
      self(self, depth + 1, acc + inc);
      if (elig) placed.pop_back();
    }
  };
  dfs(dfs, 1, 0);

  out.assignment = best_a;
  detail::finish_outcome(out, mat, judged, lambda);
  return out;
}

// Score one judged hypothesis list for a pair.  For hallucination the model
// caption is the hypothesis and the human caption the premise; omission
// swaps the roles.  An empty premise (empty model caption under omission)
// scores against a single virtual premise column so all-undetermined rows
// chart at full cost.
inline AlignmentOutcome score_pair(const CaptionPair& pair, std::span<const JudgedTarget> judged,
                                   Direction direction, Lambda lambda) {
  validate_caption_pair(pair);
  const std::vector<Sentence>& hypothesis =
      direction == Direction::Hallucination ? pair.target : pair.source;
  const std::vector<Sentence>& premise =
      direction == Direction::Hallucination ? pair.source : pair.target;
  if (judged.size() != hypothesis.size())
    throw Error(Errc::DirectionMismatch,
                "video '" + pair.video_id + "' model '" + pair.model_id + "': " +
                    std::to_string(judged.size()) + " verdicts for " +
                    std::to_string(hypothesis.size()) + " " + direction_name(direction) +
                    " hypothesis sentences");
  for (std::size_t i = 0; i < judged.size(); ++i) {
    if (judged[i].sentence.index != static_cast<int>(i) + 1)
      throw Error(Errc::DirectionMismatch,
                  "video '" + pair.video_id + "': verdict " + std::to_string(i + 1) +
                      " carries sentence index " + std::to_string(judged[i].sentence.index));
  }
  int premise_count = std::max(1, static_cast<int>(premise.size()));
  AlignmentOutcome outcome = run_alignment_dp(judged, premise_count, lambda);
  outcome.direction = direction;
  return outcome;
}

}  // namespace argus
