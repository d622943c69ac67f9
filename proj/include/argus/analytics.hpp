#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "argus/alignment.hpp"
#include "argus/core.hpp"
#include "argus/errors.hpp"

namespace argus {

// Why a hypothesis sentence drew cost.
struct SentenceFlag {
  int index = 0;
  bool costed = false;
  std::string reason;  // contradiction | undetermined | misordered-evidence |
                       // unresolved-evidence; empty when not costed
};

struct CostBreakdown {
  std::map<std::string, double> by_sentence_type;  // SUM / VD / DA shares of base cost
  std::map<std::string, double> by_verdict;        // CON / UD shares of base cost
  double base_cost = 0.0;
  double order_penalty = 0.0;
  std::vector<SentenceFlag> per_sentence_flags;
};

// Attributes every unit of base cost to the sentence that incurred it and
// names the cause.  The ordering penalty stays a separate lump (it belongs
// to pairs, not single sentences); sentences participating as the later
// element of an out-of-order pair are flagged misordered-evidence.
inline CostBreakdown breakdown_costs(const AlignmentOutcome& outcome,
                                     std::span<const JudgedTarget> judged) {
  if (static_cast<int>(judged.size()) != outcome.n)
    throw Error(Errc::InconsistentInput, "breakdown_costs: outcome does not match judged list");
  CostBreakdown bd;
  bd.by_sentence_type = {{"SUM", 0.0}, {"VD", 0.0}, {"DA", 0.0}};
  bd.by_verdict = {{"CON", 0.0}, {"UD", 0.0}};
  bd.base_cost = outcome.base_cost;
  bd.order_penalty = outcome.order_penalty;

  std::vector<int> eligible_cols;
  for (int i = 1; i <= outcome.n; ++i) {
    const JudgedTarget& t = judged[static_cast<std::size_t>(i - 1)];
    int a = outcome.assignment[static_cast<std::size_t>(i - 1)];
    SentenceFlag flag;
    flag.index = i;

    bool unit_cost = false;
    if (t.verdict != Verdict::EN) {
      unit_cost = true;
      flag.reason = t.verdict == Verdict::CON ? "contradiction" : "undetermined";
      bd.by_verdict[verdict_short_name(t.verdict)] += 1.0;
    } else if (t.stype == SentenceType::DA) {
      if (!t.evidence_index) {
        unit_cost = true;
        flag.reason = "unresolved-evidence";
      } else if (a != *t.evidence_index) {
        unit_cost = true;
        flag.reason = "misordered-evidence";
      }
    }
    if (unit_cost) bd.by_sentence_type[type_short_name(t.stype)] += 1.0;

    if (ordering_eligible(t)) {
      bool inverted = false;
      for (int prior : eligible_cols)
        if (prior > a) inverted = true;
      eligible_cols.push_back(a);
      if (inverted && flag.reason.empty()) flag.reason = "misordered-evidence";
      if (inverted) flag.costed = true;
    }
    flag.costed = flag.costed || unit_cost;
    bd.per_sentence_flags.push_back(std::move(flag));
  }
  return bd;
}

// One scored record as consumed by panel aggregation.
struct VideoScore {
  std::string video_id;
  std::string model_id;
  Direction direction = Direction::Hallucination;
  double normalized = 0.0;
  int target_sentences = 0;  // hypothesis-side sentence count of the record
};

struct ModelSummary {
  std::string model_id;
  std::optional<double> mean_h;
  std::optional<double> mean_o;
  double mean_caption_sentences = 0.0;  // model caption length, from H records
  int video_count = 0;
  std::vector<VideoScore> records;
};

// Per-model means over a rectangular panel: every model must cover the same
// video set in each direction present.
inline std::vector<ModelSummary> aggregate_models(std::span<const VideoScore> records) {
  std::map<std::string, std::vector<VideoScore>> by_model;
  std::map<Direction, std::set<std::string>> panel_videos;
  std::set<std::string> seen;
  for (const VideoScore& r : records) {
    std::string key = r.video_id + "\x1f" + r.model_id + "\x1f" + direction_letter(r.direction);
    if (!seen.insert(key).second)
      throw Error(Errc::DuplicateVideoModelKey,
                  "duplicate record for video '" + r.video_id + "' model '" + r.model_id +
                      "' direction " + direction_letter(r.direction));
    by_model[r.model_id].push_back(r);
    panel_videos[r.direction].insert(r.video_id);
  }

  std::vector<ModelSummary> out;
  for (auto& [model_id, recs] : by_model) {
    std::map<Direction, std::set<std::string>> mine;
    for (const VideoScore& r : recs) mine[r.direction].insert(r.video_id);
    for (const auto& [dir, videos] : panel_videos) {
      auto it = mine.find(dir);
      if (it == mine.end() || it->second != videos)
        throw Error(Errc::UnbalancedPanel,
                    "model '" + model_id + "' does not cover the " + direction_name(dir) +
                        " video panel (" + std::to_string(videos.size()) + " videos)");
    }

    ModelSummary s;
    s.model_id = model_id;
    double h_sum = 0, o_sum = 0, len_sum = 0;
    int h_count = 0, o_count = 0;
    for (const VideoScore& r : recs) {
      if (r.direction == Direction::Hallucination) {
        h_sum += r.normalized;
        len_sum += r.target_sentences;
        ++h_count;
      } else {
        o_sum += r.normalized;
        ++o_count;
      }
    }
    if (h_count > 0) s.mean_h = h_sum / h_count;
    if (o_count > 0) s.mean_o = o_sum / o_count;
    if (h_count > 0) s.mean_caption_sentences = len_sum / h_count;
    s.video_count = std::max(h_count, o_count);
    std::sort(recs.begin(), recs.end(), [](const VideoScore& a, const VideoScore& b) {
      if (a.video_id != b.video_id) return a.video_id < b.video_id;
      return direction_letter(a.direction) < direction_letter(b.direction);
    });
    s.records = std::move(recs);
    out.push_back(std::move(s));
  }
  return out;  // std::map iteration already sorted by model_id
}

// Product-moment correlation.  The single square root over the product of
// the two sums keeps the perfectly-correlated cases at exactly +/-1.0.
inline double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size())
    throw Error(Errc::DegenerateInput, "pearson needs equal-length vectors");
  std::size_t n = xs.size();
  if (n < 2) throw Error(Errc::DegenerateInput, "pearson needs at least 2 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw Error(Errc::DegenerateInput, "pearson is undefined for a constant vector");
  return sxy / std::sqrt(sxx * syy);
}

// Ascending 1-based ranks with average ranks on ties.
inline std::vector<double> average_ranks(std::span<const double> xs) {
  std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&xs](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

struct JudgeAgreement {
  std::vector<std::string> judges;                // sorted judge ids
  std::vector<std::string> models;                // sorted model ids (rank basis)
  std::vector<std::vector<double>> rank_pearson;  // symmetric, unit diagonal
  std::vector<std::vector<double>> raw_pearson;
};

// Pairwise agreement between judges over a shared model set: correlation of
// the models' cost ranks (ascending, average ranks on ties), with the raw
// score correlation kept alongside.
inline JudgeAgreement judge_agreement_matrix(
    const std::map<std::string, std::map<std::string, double>>& scores) {
  if (scores.size() < 2)
    throw Error(Errc::DegenerateInput, "judge agreement needs at least 2 judges");
  JudgeAgreement out;
  for (const auto& [judge, _] : scores) out.judges.push_back(judge);
  const auto& first = scores.begin()->second;
  for (const auto& [model, _] : first) out.models.push_back(model);
  if (out.models.size() < 3)
    throw Error(Errc::DegenerateInput, "judge agreement needs at least 3 models");
  for (const auto& [judge, model_scores] : scores) {
    if (model_scores.size() != out.models.size() ||
        !std::equal(out.models.begin(), out.models.end(), model_scores.begin(),
                    [](const std::string& m, const auto& kv) { return m == kv.first; }))
      throw Error(Errc::UnbalancedPanel,
                  "judge '" + judge + "' scored a different model set");
  }

  std::vector<std::vector<double>> raw_vectors, rank_vectors;
  for (const std::string& judge : out.judges) {
    std::vector<double> vals;
    for (const std::string& model : out.models) vals.push_back(scores.at(judge).at(model));
    rank_vectors.push_back(average_ranks(vals));
    raw_vectors.push_back(std::move(vals));
  }

  std::size_t j_count = out.judges.size();
  out.rank_pearson.assign(j_count, std::vector<double>(j_count, 1.0));
  out.raw_pearson.assign(j_count, std::vector<double>(j_count, 1.0));
  for (std::size_t a = 0; a < j_count; ++a) {
    for (std::size_t b = a + 1; b < j_count; ++b) {
      double rr = pearson(rank_vectors[a], rank_vectors[b]);
      double pr = pearson(raw_vectors[a], raw_vectors[b]);
      out.rank_pearson[a][b] = out.rank_pearson[b][a] = rr;
      out.raw_pearson[a][b] = out.raw_pearson[b][a] = pr;
    }
  }
  return out;
}

struct MeanStderr {
  double mean = 0.0;
  double stderr_value = 0.0;
  int runs = 0;
};

inline MeanStderr mean_stderr(std::span<const double> values) {
  if (values.size() < 2)
    throw Error(Errc::DegenerateInput, "standard error needs at least 2 runs");
  MeanStderr out;
  out.runs = static_cast<int>(values.size());
  double sum = 0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(out.runs);
  double ss = 0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  double sample_sd = std::sqrt(ss / static_cast<double>(out.runs - 1));
  out.stderr_value = sample_sd / std::sqrt(static_cast<double>(out.runs));
  return out;
}

// Prompt robustness summary.  "intra-prompt" aggregates repeated runs of the
// default prompt; "inter-prompt" aggregates one value (the per-prompt mean)
// per distinct prompt and appears only when at least two prompts exist.
inline std::map<std::string, MeanStderr> prompt_sensitivity(
    const std::map<std::string, std::vector<double>>& costs,
    const std::string& default_prompt_id) {
  auto it = costs.find(default_prompt_id);
  if (it == costs.end())
    throw Error(Errc::DegenerateInput,
                "no runs recorded for default prompt '" + default_prompt_id + "'");
  std::map<std::string, MeanStderr> out;
  out["intra-prompt"] = mean_stderr(it->second);
  if (costs.size() >= 2) {
    std::vector<double> per_prompt_means;
    for (const auto& [prompt_id, runs] : costs) {
      if (runs.empty())
        throw Error(Errc::DegenerateInput, "prompt '" + prompt_id + "' has no runs");
      double sum = 0;
      for (double v : runs) sum += v;
      per_prompt_means.push_back(sum / static_cast<double>(runs.size()));
    }
    out["inter-prompt"] = mean_stderr(per_prompt_means);
  }
  return out;
}

}  // namespace argus
