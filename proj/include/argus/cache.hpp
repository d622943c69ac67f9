#pragma once

#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "argus/errors.hpp"

namespace argus {

inline std::string iso8601_now() {
  std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

// One cached judge completion.  created_at is provenance only and never
// flows into score reports, which stay byte-stable across re-runs.
struct CacheEntry {
  std::string key;
  std::string raw_text;
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
  std::string judge_model;
  std::string created_at;
};

// Directory of JSON documents, one per cache key.  Writes go through a
// temporary file plus rename so concurrent writers never expose a torn
// document.
class VerdictCache {
 public:
  VerdictCache() = default;
  explicit VerdictCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path path_for(const std::string& key) const { return dir_ / (key + ".json"); }

  bool contains(const std::string& key) const {
    return std::filesystem::exists(path_for(key));
  }

  std::optional<CacheEntry> lookup(const std::string& key) const {
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    nlohmann::json doc;
    try {
      in >> doc;
      CacheEntry entry;
      entry.key = doc.at("key").get<std::string>();
      entry.raw_text = doc.at("raw_text").get<std::string>();
      entry.prompt_tokens = doc.at("prompt_tokens").get<long long>();
      entry.completion_tokens = doc.at("completion_tokens").get<long long>();
      entry.judge_model = doc.at("judge_model").get<std::string>();
      entry.created_at = doc.value("created_at", std::string{});
      return entry;
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::SchemaError,
                  "corrupt cache entry " + path_for(key).string() + ": " + e.what());
    }
  }

  void store(const CacheEntry& entry) const {
    std::filesystem::create_directories(dir_);
    nlohmann::json doc = {
        {"key", entry.key},
        {"raw_text", entry.raw_text},
        {"prompt_tokens", entry.prompt_tokens},
        {"completion_tokens", entry.completion_tokens},
        {"judge_model", entry.judge_model},
        {"created_at", entry.created_at},
    };
    std::filesystem::path final_path = path_for(entry.key);
    std::filesystem::path tmp_path = final_path;
    tmp_path += ".tmp-" + random_suffix();
    {
      std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
      if (!out)
        throw Error(Errc::SchemaError, "cannot write cache file " + tmp_path.string());
      out << doc.dump(2) << '\n';
    }
    std::filesystem::rename(tmp_path, final_path);
  }

 private:
  static std::string random_suffix() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    std::ostringstream os;
    os << std::hex << rng();
    return os.str();
  }

  std::filesystem::path dir_ = ".argus-cache";
};

}  // namespace argus
