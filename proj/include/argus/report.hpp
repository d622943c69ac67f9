#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "argus/analytics.hpp"
#include "argus/core.hpp"
#include "argus/errors.hpp"

namespace argus {

// Judged-sentence file: the parsed, evidence-resolved output of one judge
// call, stored as one JSON document per (video, model, direction) so scoring
// never needs to re-touch the judge.
struct JudgedDocument {
  std::string video_id;
  std::string model_id;
  Direction direction = Direction::Hallucination;
  std::string judge_model;
  std::string cache_key;  // empty for synthetic documents (no judge call)
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
  int premise_sentences = 0;
  std::string note;  // set on synthetic documents (e.g. empty model caption)
  std::vector<JudgedTarget> targets;
};

inline nlohmann::json to_json(const JudgedDocument& doc) {
  nlohmann::json targets = nlohmann::json::array();
  for (const JudgedTarget& t : doc.targets) {
    nlohmann::json jt = {
        {"index", t.sentence.index},
        {"text", t.sentence.text},
        {"type", type_label(t.stype)},
        {"verdict", verdict_label(t.verdict)},
        {"evidence_text", t.evidence_text},
        {"reasoning", t.reasoning},
    };
    if (t.evidence_index) jt["evidence_index"] = *t.evidence_index;
    else jt["evidence_index"] = nullptr;
    targets.push_back(std::move(jt));
  }
  nlohmann::json out = {
      {"video_id", doc.video_id},
      {"model_id", doc.model_id},
      {"direction", std::string(1, direction_letter(doc.direction))},
      {"judge_model", doc.judge_model},
      {"cache_key", doc.cache_key},
      {"prompt_tokens", doc.prompt_tokens},
      {"completion_tokens", doc.completion_tokens},
      {"premise_sentences", doc.premise_sentences},
      {"targets", std::move(targets)},
  };
  if (!doc.note.empty()) out["note"] = doc.note;
  return out;
}

inline JudgedDocument judged_document_from_json(const nlohmann::json& j) {
  try {
    JudgedDocument doc;
    doc.video_id = j.at("video_id").get<std::string>();
    doc.model_id = j.at("model_id").get<std::string>();
    doc.direction = parse_direction_letter(j.at("direction").get<std::string>());
    doc.judge_model = j.at("judge_model").get<std::string>();
    doc.cache_key = j.at("cache_key").get<std::string>();
    doc.prompt_tokens = j.at("prompt_tokens").get<long long>();
    doc.completion_tokens = j.at("completion_tokens").get<long long>();
    doc.premise_sentences = j.at("premise_sentences").get<int>();
    doc.note = j.value("note", std::string{});
    for (const nlohmann::json& jt : j.at("targets")) {
      JudgedTarget t;
      t.sentence.index = jt.at("index").get<int>();
      t.sentence.text = jt.at("text").get<std::string>();
      t.stype = parse_sentence_type(jt.at("type").get<std::string>());
      t.verdict = parse_verdict(jt.at("verdict").get<std::string>());
      if (!jt.at("evidence_index").is_null())
        t.evidence_index = jt.at("evidence_index").get<int>();
      t.evidence_text = jt.at("evidence_text").get<std::string>();
      t.reasoning = jt.at("reasoning").get<std::string>();
      doc.targets.push_back(std::move(t));
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaError, std::string("bad judged document: ") + e.what());
  }
}

inline void write_judged_document(const std::filesystem::path& path, const JudgedDocument& doc) {
  std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::SchemaError, "cannot write " + path.string());
    out << to_json(doc).dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

inline JudgedDocument read_judged_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MissingVerdicts, "no judged file at " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaError, path.string() + ": " + e.what());
  }
  return judged_document_from_json(j);
}

// One scored (video, model, direction) row of a score report.
struct ReportRecord {
  std::string video_id;
  std::string model_id;
  Direction direction = Direction::Hallucination;
  double normalized = 0.0;
  double raw_total = 0.0;
  double base_cost = 0.0;
  double order_penalty = 0.0;
  int n = 0;
  int d = 0;
  bool degenerate = false;
  double lambda_value = 0.0;
  CostBreakdown breakdown;
  std::string judge_model;
  std::string cache_key;
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
};

inline nlohmann::json to_json(const ReportRecord& r) {
  nlohmann::json flags = nlohmann::json::array();
  for (const SentenceFlag& f : r.breakdown.per_sentence_flags)
    flags.push_back({{"index", f.index}, {"costed", f.costed}, {"reason", f.reason}});
  return nlohmann::json{
      {"video_id", r.video_id},
      {"model_id", r.model_id},
      {"direction", std::string(1, direction_letter(r.direction))},
      {"normalized", r.normalized},
      {"raw_total", r.raw_total},
      {"base_cost", r.base_cost},
      {"order_penalty", r.order_penalty},
      {"n", r.n},
      {"d", r.d},
      {"degenerate", r.degenerate},
      {"lambda", r.lambda_value},
      {"breakdown",
       {{"by_sentence_type", r.breakdown.by_sentence_type},
        {"by_verdict", r.breakdown.by_verdict},
        {"base_cost", r.breakdown.base_cost},
        {"order_penalty", r.breakdown.order_penalty},
        {"per_sentence_flags", std::move(flags)}}},
      {"judge",
       {{"model", r.judge_model},
        {"cache_key", r.cache_key},
        {"prompt_tokens", r.prompt_tokens},
        {"completion_tokens", r.completion_tokens}}},
  };
}

inline ReportRecord report_record_from_json(const nlohmann::json& j) {
  try {
    ReportRecord r;
    r.video_id = j.at("video_id").get<std::string>();
    r.model_id = j.at("model_id").get<std::string>();
    r.direction = parse_direction_letter(j.at("direction").get<std::string>());
    r.normalized = j.at("normalized").get<double>();
    r.raw_total = j.at("raw_total").get<double>();
    r.base_cost = j.at("base_cost").get<double>();
    r.order_penalty = j.at("order_penalty").get<double>();
    r.n = j.at("n").get<int>();
    r.d = j.at("d").get<int>();
    r.degenerate = j.at("degenerate").get<bool>();
    r.lambda_value = j.at("lambda").get<double>();
    const nlohmann::json& bd = j.at("breakdown");
    r.breakdown.by_sentence_type =
        bd.at("by_sentence_type").get<std::map<std::string, double>>();
    r.breakdown.by_verdict = bd.at("by_verdict").get<std::map<std::string, double>>();
    r.breakdown.base_cost = bd.at("base_cost").get<double>();
    r.breakdown.order_penalty = bd.at("order_penalty").get<double>();
    for (const nlohmann::json& jf : bd.at("per_sentence_flags")) {
      SentenceFlag f;
      f.index = jf.at("index").get<int>();
      f.costed = jf.at("costed").get<bool>();
      f.reason = jf.at("reason").get<std::string>();
      r.breakdown.per_sentence_flags.push_back(std::move(f));
    }
    const nlohmann::json& judge = j.at("judge");
    r.judge_model = judge.at("model").get<std::string>();
    r.cache_key = judge.at("cache_key").get<std::string>();
    r.prompt_tokens = judge.at("prompt_tokens").get<long long>();
    r.completion_tokens = judge.at("completion_tokens").get<long long>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaError, std::string("bad report record: ") + e.what());
  }
}

inline void write_report_jsonl(const std::filesystem::path& path,
                               std::span<const ReportRecord> records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::SchemaError, "cannot write " + path.string());
    for (const ReportRecord& r : records) out << to_json(r).dump() << '\n';
  }
  std::filesystem::rename(tmp, path);
}

inline std::vector<ReportRecord> read_report_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::SchemaError, "cannot open report file " + path.string());
  std::vector<ReportRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_view(line).empty()) continue;
    try {
      records.push_back(report_record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::SchemaError,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace argus
