#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "argus/core.hpp"
#include "argus/errors.hpp"

namespace argus {

// A caption as it appeared in the dataset: either raw prose to be segmented
// or an explicit list of sentences.
struct CaptionText {
  std::string text;
  std::vector<std::string> lines;
  bool pre_segmented = false;
};

struct DatasetRecord {
  std::string video_id;
  CaptionText human_caption;
  std::map<std::string, CaptionText> model_captions;
  std::map<std::string, std::string> metadata;
  int source_line = 0;  // 1-based line in the dataset file, for diagnostics
};

namespace detail {

inline CaptionText caption_from_json(const nlohmann::json& j, const std::string& where) {
  CaptionText c;
  if (j.is_string()) {
    c.text = j.get<std::string>();
    return c;
  }
  if (j.is_array()) {
    c.pre_segmented = true;
    for (const nlohmann::json& item : j) {
      if (!item.is_string())
        throw Error(Errc::SchemaError, where + ": caption line list must hold strings");
      c.lines.push_back(item.get<std::string>());
    }
    return c;
  }
  throw Error(Errc::SchemaError, where + ": caption must be a string or a string array");
}

inline std::string scalar_to_string(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace detail

// Segment a dataset caption.  An explicit line list always wins; otherwise
// line_mode treats the text as newline-separated sentences and the default
// runs the heuristic splitter.
inline std::vector<Sentence> caption_sentences(const CaptionText& caption, bool line_mode) {
  if (caption.pre_segmented) return sentences_from_list(caption.lines);
  if (line_mode) return segment_lines(caption.text);
  return segment_caption(caption.text);
}

inline std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::SchemaError, "cannot open dataset " + path.string());
  std::vector<DatasetRecord> records;
  std::set<std::string> seen_videos;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_view(line).empty()) continue;
    std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::SchemaError, where + ": " + e.what());
    }
    if (!j.is_object()) throw Error(Errc::SchemaError, where + ": record must be an object");

    DatasetRecord rec;
    rec.source_line = line_no;
    if (!j.contains("video_id") || !j["video_id"].is_string() ||
        j["video_id"].get<std::string>().empty())
      throw Error(Errc::MissingId, where + ": video_id missing or empty");
    rec.video_id = j["video_id"].get<std::string>();
    if (!seen_videos.insert(rec.video_id).second)
      throw Error(Errc::SchemaError, where + ": duplicate video_id '" + rec.video_id + "'");

    if (!j.contains("human_caption"))
      throw Error(Errc::SchemaError, where + ": human_caption missing");
    rec.human_caption = detail::caption_from_json(j["human_caption"], where);

    if (!j.contains("model_captions") || !j["model_captions"].is_object())
      throw Error(Errc::SchemaError, where + ": model_captions must be an object");
    for (const auto& [model_id, caption] : j["model_captions"].items()) {
      if (model_id.empty()) throw Error(Errc::MissingId, where + ": empty model id");
      rec.model_captions[model_id] =
          detail::caption_from_json(caption, where + " model '" + model_id + "'");
    }

    if (j.contains("metadata")) {
      if (!j["metadata"].is_object())
        throw Error(Errc::SchemaError, where + ": metadata must be an object");
      for (const auto& [key, value] : j["metadata"].items())
        rec.metadata[key] = detail::scalar_to_string(value);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

// Builds the scoring pair for one model of a dataset record.  The human
// caption must yield at least one sentence; the model caption may be empty.
inline CaptionPair make_caption_pair(const DatasetRecord& record, const std::string& model_id,
                                     bool line_mode) {
  auto it = record.model_captions.find(model_id);
  if (it == record.model_captions.end())
    throw Error(Errc::MissingId,
                "video '" + record.video_id + "' has no caption for model '" + model_id + "'");
  CaptionPair pair;
  pair.video_id = record.video_id;
  pair.model_id = model_id;
  pair.source = caption_sentences(record.human_caption, line_mode);
  pair.target = caption_sentences(it->second, line_mode);
  pair.metadata = record.metadata;
  validate_caption_pair(pair);
  return pair;
}

}  // namespace argus
