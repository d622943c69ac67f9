#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "argus/alignment.hpp"
#include "argus/analytics.hpp"
#include "argus/cache.hpp"
#include "argus/client.hpp"
#include "argus/core.hpp"
#include "argus/dataset.hpp"
#include "argus/errors.hpp"
#include "argus/judge.hpp"
#include "argus/report.hpp"
#include "argus/synthetic.hpp"
#include "argus/transport.hpp"

namespace argus {

struct PairFailure {
  std::string video_id;
  std::string model_id;
  std::string direction;  // "H" or "O"
  std::string error;
};

// File stem shared by judged documents and fixture completions.
inline std::string pair_stem(std::string_view video_id, std::string_view model_id,
                             Direction direction) {
  return sanitize_id(video_id) + "__" + sanitize_id(model_id) + "__" +
         direction_letter(direction);
}

namespace detail {

struct PairTask {
  const DatasetRecord* record = nullptr;
  std::string model_id;
  Direction direction = Direction::Hallucination;
};

// Dataset order, then model id, then H before O; collisions of sanitized
// file stems across distinct pairs are refused up front.
inline std::vector<PairTask> enumerate_pairs(const std::vector<DatasetRecord>& records,
                                             const std::vector<std::string>& model_filter,
                                             const std::vector<Direction>& directions) {
  std::set<std::string> filter(model_filter.begin(), model_filter.end());
  std::set<std::string> matched;
  std::vector<PairTask> tasks;
  std::map<std::string, std::pair<std::string, std::string>> stems;
  for (const DatasetRecord& rec : records) {
    for (const auto& [model_id, caption] : rec.model_captions) {
      if (!filter.empty() && !filter.count(model_id)) continue;
      matched.insert(model_id);
      for (Direction dir : directions) {
        std::string stem = pair_stem(rec.video_id, model_id, dir);
        auto [it, fresh] = stems.try_emplace(stem, rec.video_id, model_id);
        if (!fresh && (it->second.first != rec.video_id || it->second.second != model_id))
          throw Error(Errc::DuplicateVideoModelKey,
                      "ids ('" + rec.video_id + "', '" + model_id + "') and ('" +
                          it->second.first + "', '" + it->second.second +
                          "') collide at file stem '" + stem + "'");
        tasks.push_back({&rec, model_id, dir});
      }
    }
  }
  for (const std::string& wanted : filter) {
    if (!matched.count(wanted))
      throw Error(Errc::UsageError, "model '" + wanted + "' appears nowhere in the dataset");
  }
  return tasks;
}

template <typename Fn>
inline void parallel_for(std::size_t count, int parallelism, Fn&& fn) {
  int workers = std::max(1, std::min<int>(parallelism, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&next, count, &fn]() {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

inline void sort_failures(std::vector<PairFailure>& failures) {
  std::sort(failures.begin(), failures.end(), [](const PairFailure& a, const PairFailure& b) {
    if (a.video_id != b.video_id) return a.video_id < b.video_id;
    if (a.model_id != b.model_id) return a.model_id < b.model_id;
    return a.direction < b.direction;
  });
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace detail

// Machine-readable per-pair failure manifest.  Present only when the last
// run left failures behind.
inline void write_error_manifest(const std::filesystem::path& dir,
                                 std::vector<PairFailure> failures) {
  std::filesystem::create_directories(dir);
  std::filesystem::path path = dir / "errors.json";
  if (failures.empty()) {
    std::filesystem::remove(path);
    return;
  }
  detail::sort_failures(failures);
  nlohmann::json list = nlohmann::json::array();
  for (const PairFailure& f : failures)
    list.push_back({{"video_id", f.video_id},
                    {"model_id", f.model_id},
                    {"direction", f.direction},
                    {"error", f.error}});
  nlohmann::json doc = {{"failures", std::move(list)}};
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << doc.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

struct JudgeRunOptions {
  std::filesystem::path dataset_path;
  std::filesystem::path judged_dir;
  std::vector<std::string> model_filter;
  std::vector<Direction> directions{Direction::Hallucination, Direction::Omission};
  bool line_mode = false;
  int parallelism = 4;
  JudgeConfig config;
  std::shared_ptr<Transport> transport;
};

struct JudgeRunResult {
  int pairs = 0;
  std::vector<PairFailure> failures;
};

// Judge every requested (video, model, direction): ensure a cached raw
// completion and write the parsed, evidence-resolved judged document.
// Pairs with nothing to judge (empty hypothesis or empty premise) get
// synthetic documents so scoring never needs special cases.  Warm runs are
// network-free via the cache and rewrite byte-identical documents.
inline JudgeRunResult run_judge(const JudgeRunOptions& options) {
  if (!options.transport) throw Error(Errc::UsageError, "run_judge needs a transport");
  std::vector<DatasetRecord> records = load_dataset(options.dataset_path);
  std::vector<detail::PairTask> tasks =
      detail::enumerate_pairs(records, options.model_filter, options.directions);
  JudgeClient client(options.config, options.transport);
  std::filesystem::create_directories(options.judged_dir);

  JudgeRunResult result;
  result.pairs = static_cast<int>(tasks.size());
  std::mutex failures_mutex;

  detail::parallel_for(tasks.size(), options.parallelism, [&](std::size_t idx) {
    const detail::PairTask& task = tasks[idx];
    try {
      CaptionPair pair = make_caption_pair(*task.record, task.model_id, options.line_mode);
      const std::vector<Sentence>& hypothesis =
          task.direction == Direction::Hallucination ? pair.target : pair.source;
      const std::vector<Sentence>& premise =
          task.direction == Direction::Hallucination ? pair.source : pair.target;

      JudgedDocument doc;
      doc.video_id = pair.video_id;
      doc.model_id = pair.model_id;
      doc.direction = task.direction;
      doc.premise_sentences = static_cast<int>(premise.size());

      if (hypothesis.empty()) {
        doc.note = "empty hypothesis caption: nothing to judge";
      } else if (premise.empty()) {
        doc.note = "empty premise caption: every hypothesis sentence is undetermined";
        for (const Sentence& s : hypothesis) {
          JudgedTarget t;
          t.sentence = s;
          t.stype = SentenceType::VD;
          t.verdict = Verdict::UD;
          t.reasoning = "The premise caption is empty, so nothing can be entailed.";
          doc.targets.push_back(std::move(t));
        }
      } else {
        JudgeRequest request;
        request.video_id = pair.video_id;
        request.model_id = pair.model_id;
        request.direction = task.direction;
        request.prompt = build_judge_prompt(premise, hypothesis, client.config());
        request.key = cache_key(pair.video_id, pair.model_id, task.direction, client.config(),
                                render_numbered(premise), render_numbered(hypothesis));
        RawJudgeResponse reply = client.request_verdicts(request);
        std::vector<JudgedTarget> targets;
        try {
          targets = parse_judge_response(reply, hypothesis);
        } catch (const Error& e) {
          if (e.code() != Errc::LineCountMismatch) throw;
          // one fresh completion, then give up
          reply = client.request_verdicts(request, /*bypass_cache=*/true);
          targets = parse_judge_response(reply, hypothesis);
        }
        resolve_all_evidence(targets, premise);
        doc.judge_model = reply.model_id;
        doc.cache_key = request.key;
        doc.prompt_tokens = reply.prompt_tokens;
        doc.completion_tokens = reply.completion_tokens;
        doc.targets = std::move(targets);
      }
      write_judged_document(
          options.judged_dir / (pair_stem(pair.video_id, pair.model_id, task.direction) + ".json"),
          doc);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(failures_mutex);
      result.failures.push_back({task.record->video_id, task.model_id,
                                 std::string(1, direction_letter(task.direction)), e.what()});
    }
  });

  detail::sort_failures(result.failures);
  write_error_manifest(options.judged_dir, result.failures);
  return result;
}

struct ScoreRunOptions {
  std::filesystem::path dataset_path;
  std::filesystem::path judged_dir;
  std::filesystem::path output_path;
  std::filesystem::path summary_path;  // empty = derive from output_path
  std::vector<std::string> model_filter;
  std::vector<Direction> directions{Direction::Hallucination, Direction::Omission};
  bool line_mode = false;
  Lambda lambda;
};

struct ScoreRunResult {
  std::vector<ReportRecord> records;
  std::vector<PairFailure> failures;
};

inline std::filesystem::path default_summary_path(const std::filesystem::path& output_path) {
  std::filesystem::path p = output_path;
  p.replace_extension();
  p += ".summary.csv";
  return p;
}

// Per-(model, direction) means over the scored records.
inline void write_score_summary_csv(const std::filesystem::path& path,
                                    std::span<const ReportRecord> records) {
  struct Bucket {
    int count = 0;
    double normalized = 0, raw = 0, base = 0, penalty = 0, sentences = 0;
  };
  std::map<std::pair<std::string, char>, Bucket> buckets;
  for (const ReportRecord& r : records) {
    Bucket& b = buckets[{r.model_id, direction_letter(r.direction)}];
    ++b.count;
    b.normalized += r.normalized;
    b.raw += r.raw_total;
    b.base += r.base_cost;
    b.penalty += r.order_penalty;
    b.sentences += r.n;
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::SchemaError, "cannot write " + path.string());
    out << "model_id,direction,videos,mean_normalized,mean_raw_total,mean_base_cost,"
           "mean_order_penalty,mean_hypothesis_sentences\n";
    for (const auto& [key, b] : buckets) {
      double n = static_cast<double>(b.count);
      out << csv_escape(key.first) << ',' << key.second << ',' << b.count << ','
          << detail::format_double(b.normalized / n) << ',' << detail::format_double(b.raw / n)
          << ',' << detail::format_double(b.base / n) << ','
          << detail::format_double(b.penalty / n) << ','
          << detail::format_double(b.sentences / n) << '\n';
    }
  }
  std::filesystem::rename(tmp, path);
}

// Score judged documents against the dataset and emit the JSONL report plus
// a per-model CSV summary.  Deterministic: records follow dataset order and
// every value derives from exact integer cost keys.
inline ScoreRunResult run_score(const ScoreRunOptions& options) {
  std::vector<DatasetRecord> records = load_dataset(options.dataset_path);
  std::vector<detail::PairTask> tasks =
      detail::enumerate_pairs(records, options.model_filter, options.directions);

  ScoreRunResult result;
  for (const detail::PairTask& task : tasks) {
    try {
      CaptionPair pair = make_caption_pair(*task.record, task.model_id, options.line_mode);
      std::filesystem::path doc_path =
          options.judged_dir / (pair_stem(pair.video_id, pair.model_id, task.direction) + ".json");
      JudgedDocument doc = read_judged_document(doc_path);
      if (doc.video_id != pair.video_id || doc.model_id != pair.model_id ||
          doc.direction != task.direction)
        throw Error(Errc::InconsistentInput,
                    doc_path.string() + " belongs to a different pair");
      const std::vector<Sentence>& hypothesis =
          task.direction == Direction::Hallucination ? pair.target : pair.source;
      const std::vector<Sentence>& premise =
          task.direction == Direction::Hallucination ? pair.source : pair.target;
      if (doc.premise_sentences != static_cast<int>(premise.size()))
        throw Error(Errc::DirectionMismatch,
                    doc_path.string() + ": judged against " +
                        std::to_string(doc.premise_sentences) + " premise sentences, dataset has " +
                        std::to_string(premise.size()));
      for (std::size_t i = 0; i < doc.targets.size() && i < hypothesis.size(); ++i) {
        if (doc.targets[i].sentence.text != hypothesis[i].text)
          throw Error(Errc::InconsistentInput,
                      doc_path.string() + ": hypothesis sentence " + std::to_string(i + 1) +
                          " differs from the dataset caption");
      }

      AlignmentOutcome outcome = score_pair(pair, doc.targets, task.direction, options.lambda);
      ReportRecord rec;
      rec.video_id = pair.video_id;
      rec.model_id = pair.model_id;
      rec.direction = task.direction;
      rec.normalized = outcome.normalized;
      rec.raw_total = outcome.raw_total;
      rec.base_cost = outcome.base_cost;
      rec.order_penalty = outcome.order_penalty;
      rec.n = outcome.n;
      rec.d = outcome.d;
      rec.degenerate = outcome.degenerate;
      rec.lambda_value = options.lambda.value();
      rec.breakdown = breakdown_costs(outcome, doc.targets);
      rec.judge_model = doc.judge_model;
      rec.cache_key = doc.cache_key;
      rec.prompt_tokens = doc.prompt_tokens;
      rec.completion_tokens = doc.completion_tokens;
      result.records.push_back(std::move(rec));
    } catch (const std::exception& e) {
      result.failures.push_back({task.record->video_id, task.model_id,
                                 std::string(1, direction_letter(task.direction)), e.what()});
    }
  }

  write_report_jsonl(options.output_path, result.records);
  std::filesystem::path summary = options.summary_path.empty()
                                      ? default_summary_path(options.output_path)
                                      : options.summary_path;
  write_score_summary_csv(summary, result.records);
  return result;
}

struct OracleRunOptions {
  std::filesystem::path judged_dir;  // scanned when random_instances == 0
  std::filesystem::path output_path;
  Lambda lambda;
  std::uint64_t max_states = 1000000;
  int random_instances = 0;
  int random_max_n = 8;
  int random_max_m = 6;
  std::uint64_t seed = 12345;
};

struct OracleRow {
  std::string id;
  int n = 0, m = 0, d = 0;
  double dp_raw = 0, oracle_raw = 0, gap = 0;
};

struct OracleRunResult {
  int instances = 0;
  int skipped = 0;        // above the enumeration bound
  int positive_gaps = 0;  // DP strictly above the global optimum
  double max_gap = 0;
  std::vector<OracleRow> rows;
};

// Audit the alignment search against exhaustive enumeration.  The search
// never beats the oracle (its result is an achievable assignment), so every
// gap is >= 0; gaps quantify what the single-history heuristic gives up.
inline OracleRunResult run_oracle(const OracleRunOptions& options) {
  struct Instance {
    std::string id;
    std::vector<JudgedTarget> judged;
    int m = 0;
  };
  std::vector<Instance> instances;

  if (options.random_instances > 0) {
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<int> n_pick(1, options.random_max_n);
    std::uniform_int_distribution<int> m_pick(1, options.random_max_m);
    for (int i = 0; i < options.random_instances; ++i) {
      Instance inst;
      char id[32];
      std::snprintf(id, sizeof(id), "synthetic-%06d", i);
      inst.id = id;
      inst.m = m_pick(rng);
      inst.judged = synthetic_instance(rng, n_pick(rng), inst.m);
      instances.push_back(std::move(inst));
    }
  } else {
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(options.judged_dir)) {
      if (entry.path().extension() == ".json" && entry.path().filename() != "errors.json")
        paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    for (const std::filesystem::path& p : paths) {
      JudgedDocument doc = read_judged_document(p);
      Instance inst;
      inst.id = doc.video_id + "__" + doc.model_id + "__" + direction_letter(doc.direction);
      inst.m = std::max(1, doc.premise_sentences);
      inst.judged = std::move(doc.targets);
      instances.push_back(std::move(inst));
    }
  }

  OracleRunResult result;
  auto key_of = [&options](const AlignmentOutcome& o) {
    return o.base_units * options.lambda.den + o.penalty_pairs * options.lambda.num;
  };
  for (const Instance& inst : instances) {
    ++result.instances;
    AlignmentOutcome dp = run_alignment_dp(inst.judged, inst.m, options.lambda);
    AlignmentOutcome oracle;
    try {
      oracle = brute_force_alignment(inst.judged, inst.m, options.lambda, options.max_states);
    } catch (const Error& e) {
      if (e.code() != Errc::InstanceTooLarge) throw;
      ++result.skipped;
      continue;
    }
    std::int64_t gap_key = key_of(dp) - key_of(oracle);
    if (gap_key < 0)
      throw Error(Errc::InconsistentInput, "oracle above DP on " + inst.id);
    OracleRow row;
    row.id = inst.id;
    row.n = dp.n;
    row.m = dp.m;
    row.d = dp.d;
    row.dp_raw = dp.raw_total;
    row.oracle_raw = oracle.raw_total;
    row.gap = static_cast<double>(gap_key) / static_cast<double>(options.lambda.den);
    if (gap_key > 0) ++result.positive_gaps;
    result.max_gap = std::max(result.max_gap, row.gap);
    result.rows.push_back(std::move(row));
  }

  if (!options.output_path.empty()) {
    if (options.output_path.has_parent_path())
      std::filesystem::create_directories(options.output_path.parent_path());
    std::filesystem::path tmp = options.output_path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(Errc::SchemaError, "cannot write " + options.output_path.string());
      out << "id,n,m,d,dp_raw,oracle_raw,gap\n";
      for (const OracleRow& row : result.rows) {
        out << csv_escape(row.id) << ',' << row.n << ',' << row.m << ',' << row.d << ','
            << detail::format_double(row.dp_raw) << ',' << detail::format_double(row.oracle_raw)
            << ',' << detail::format_double(row.gap) << '\n';
      }
    }
    std::filesystem::rename(tmp, options.output_path);
  }
  return result;
}

struct ReportInput {
  std::string label;
  std::filesystem::path path;
};

struct ReportRunOptions {
  std::string mode;  // summary | sensitivity | judge-agreement
  std::vector<ReportInput> inputs;
  std::filesystem::path output_path;
  Direction direction = Direction::Hallucination;  // sensitivity / agreement filter
  std::string default_prompt;                      // sensitivity; empty = first label
};

namespace detail {

inline std::vector<VideoScore> to_video_scores(std::span<const ReportRecord> records) {
  std::vector<VideoScore> scores;
  scores.reserve(records.size());
  for (const ReportRecord& r : records)
    scores.push_back({r.video_id, r.model_id, r.direction, r.normalized, r.n});
  return scores;
}

inline double mean_normalized(std::span<const ReportRecord> records, Direction direction,
                              const std::string& where) {
  double sum = 0;
  int count = 0;
  for (const ReportRecord& r : records) {
    if (r.direction != direction) continue;
    sum += r.normalized;
    ++count;
  }
  if (count == 0)
    throw Error(Errc::DegenerateInput,
                where + " has no " + direction_name(direction) + " records");
  return sum / count;
}

template <typename WriteBody>
inline void write_csv(const std::filesystem::path& path, WriteBody&& body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::SchemaError, "cannot write " + path.string());
    body(out);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

// Aggregate score reports.  summary: per-model panel means.  sensitivity:
// each input is one run, labels name the prompt, the default prompt's
// repeats form the intra scope.  judge-agreement: each input is one judge's
// report; emits pairwise rank and raw correlations.
inline void run_report(const ReportRunOptions& options) {
  if (options.inputs.empty()) throw Error(Errc::UsageError, "report needs input files");

  if (options.mode == "summary") {
    std::vector<ReportRecord> all;
    for (const ReportInput& input : options.inputs) {
      std::vector<ReportRecord> records = read_report_jsonl(input.path);
      all.insert(all.end(), records.begin(), records.end());
    }
    std::vector<VideoScore> scores = detail::to_video_scores(all);
    std::vector<ModelSummary> summaries = aggregate_models(scores);
    detail::write_csv(options.output_path, [&summaries](std::ofstream& out) {
      out << "model_id,videos,mean_arguscost_h,mean_arguscost_o,mean_caption_sentences\n";
      for (const ModelSummary& s : summaries) {
        out << csv_escape(s.model_id) << ',' << s.video_count << ','
            << (s.mean_h ? detail::format_double(*s.mean_h) : std::string{}) << ','
            << (s.mean_o ? detail::format_double(*s.mean_o) : std::string{}) << ','
            << detail::format_double(s.mean_caption_sentences) << '\n';
      }
    });
    return;
  }

  if (options.mode == "sensitivity") {
    std::map<std::string, std::vector<double>> runs;
    std::vector<std::string> label_order;
    for (const ReportInput& input : options.inputs) {
      if (!runs.count(input.label)) label_order.push_back(input.label);
      std::vector<ReportRecord> records = read_report_jsonl(input.path);
      runs[input.label].push_back(
          detail::mean_normalized(records, options.direction, input.path.string()));
    }
    std::string default_prompt =
        options.default_prompt.empty() ? label_order.front() : options.default_prompt;
    std::map<std::string, MeanStderr> table = prompt_sensitivity(runs, default_prompt);
    detail::write_csv(options.output_path, [&table](std::ofstream& out) {
      out << "scope,mean,stderr,runs\n";
      for (const auto& [scope, stat] : table) {
        out << scope << ',' << detail::format_double(stat.mean) << ','
            << detail::format_double(stat.stderr_value) << ',' << stat.runs << '\n';
      }
    });
    return;
  }

  if (options.mode == "judge-agreement") {
    std::map<std::string, std::map<std::string, double>> scores;
    for (const ReportInput& input : options.inputs) {
      std::vector<ReportRecord> records = read_report_jsonl(input.path);
      std::map<std::string, std::vector<double>> by_model;
      for (const ReportRecord& r : records) {
        if (r.direction != options.direction) continue;
        by_model[r.model_id].push_back(r.normalized);
      }
      if (by_model.empty())
        throw Error(Errc::DegenerateInput, input.path.string() + " has no " +
                                               direction_name(options.direction) + " records");
      std::map<std::string, double>& means = scores[input.label];
      for (const auto& [model_id, values] : by_model) {
        double sum = 0;
        for (double v : values) sum += v;
        means[model_id] = sum / static_cast<double>(values.size());
      }
    }
    JudgeAgreement agreement = judge_agreement_matrix(scores);
    detail::write_csv(options.output_path, [&agreement](std::ofstream& out) {
      out << "judge_a,judge_b,rank_pearson,raw_pearson\n";
      for (std::size_t a = 0; a < agreement.judges.size(); ++a) {
        for (std::size_t b = a + 1; b < agreement.judges.size(); ++b) {
          out << csv_escape(agreement.judges[a]) << ',' << csv_escape(agreement.judges[b]) << ','
              << detail::format_double(agreement.rank_pearson[a][b]) << ','
              << detail::format_double(agreement.raw_pearson[a][b]) << '\n';
        }
      }
    });
    return;
  }

  throw Error(Errc::UsageError, "unknown report mode '" + options.mode + "'");
}

}  // namespace argus
