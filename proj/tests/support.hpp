#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "argus/core.hpp"
#include "argus/errors.hpp"
#include "argus/transport.hpp"

namespace argus_test {

// Matcher for CHECK_THROWS_MATCHES(expr, argus::Error, HasErrc(...)).
class ErrcMatcher : public Catch::Matchers::MatcherGenericBase {
 public:
  explicit ErrcMatcher(argus::Errc expected) : expected_(expected) {}
  bool match(const argus::Error& e) const { return e.code() == expected_; }
  std::string describe() const override {
    return std::string("has error code ") + argus::errc_name(expected_);
  }

 private:
  argus::Errc expected_;
};

inline ErrcMatcher HasErrc(argus::Errc expected) { return ErrcMatcher(expected); }

inline std::filesystem::path fixture_dir() { return ARGUS_FIXTURE_DIR; }

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    std::mt19937_64 rng{std::random_device{}()};
    std::ostringstream name;
    name << "argus-test-" << std::hex << rng() << "-" << counter.fetch_add(1);
    path_ = std::filesystem::temp_directory_path() / name.str();
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::vector<argus::Sentence> sentences(const std::vector<std::string>& texts) {
  std::vector<argus::Sentence> out;
  for (std::size_t i = 0; i < texts.size(); ++i)
    out.push_back({static_cast<int>(i) + 1, texts[i]});
  return out;
}

inline argus::JudgedTarget jt(int index, argus::SentenceType t, argus::Verdict v,
                              std::optional<int> evidence = std::nullopt,
                              std::string evidence_text = "", std::string reasoning = "because") {
  argus::JudgedTarget out;
  out.sentence = {index, "sentence " + std::to_string(index)};
  out.stype = t;
  out.verdict = v;
  out.evidence_index = evidence;
  out.evidence_text = std::move(evidence_text);
  out.reasoning = std::move(reasoning);
  return out;
}

// Transport that replays a scripted sequence: each step is either a canned
// completion or an exception to throw.
class ScriptedTransport : public argus::Transport {
 public:
  struct Step {
    std::string text;
    bool transient_failure = false;
    bool auth_failure = false;
  };

  explicit ScriptedTransport(std::vector<Step> steps) : steps_(std::move(steps)) {}

  argus::RawJudgeResponse send(const argus::JudgeRequest&, const argus::JudgeConfig&) override {
    std::size_t i = next_.fetch_add(1);
    if (i >= steps_.size())
      throw argus::Error(argus::Errc::InconsistentInput, "scripted transport ran out of steps");
    const Step& step = steps_[i];
    if (step.transient_failure)
      throw argus::TransientError(argus::Errc::HttpError, "scripted transient failure");
    if (step.auth_failure)
      throw argus::Error(argus::Errc::AuthError, "scripted auth failure");
    argus::RawJudgeResponse reply;
    reply.text = step.text;
    reply.prompt_tokens = 11;
    reply.completion_tokens = 7;
    reply.model_id = "scripted-judge";
    return reply;
  }

  int calls() const { return static_cast<int>(next_.load()); }

 private:
  std::vector<Step> steps_;
  std::atomic<std::size_t> next_{0};
};

}  // namespace argus_test
