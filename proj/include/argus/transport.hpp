#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "argus/core.hpp"
#include "argus/errors.hpp"
#include "argus/judge.hpp"
#include "argus/text.hpp"

namespace argus {

// One judge call, addressed by the caption pair it belongs to.
struct JudgeRequest {
  std::string video_id;
  std::string model_id;
  Direction direction = Direction::Hallucination;
  std::string prompt;
  std::string key;  // cache key for this call
};

// Delivery mechanism for judge prompts.  Implementations throw
// TransientError for failures a retry loop may re-attempt and Error for
// permanent ones.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual RawJudgeResponse send(const JudgeRequest& request, const JudgeConfig& config) = 0;
};

// Serves canned completions from a directory, one file per (video, model,
// direction): "<video>__<model>__<H|O>.txt" with sanitized ids.  This is the
// offline judging path, not a test shim: acceptance runs and re-scoring
// audits use it to keep the pipeline byte-deterministic with no network.
class FixtureTransport : public Transport {
 public:
  explicit FixtureTransport(std::filesystem::path dir) : dir_(std::move(dir)) {}

  static std::string file_name(std::string_view video_id, std::string_view model_id,
                               Direction direction) {
    return sanitize_id(video_id) + "__" + sanitize_id(model_id) + "__" +
           direction_letter(direction) + std::string(".txt");
  }

  RawJudgeResponse send(const JudgeRequest& request, const JudgeConfig& config) override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    std::filesystem::path path =
        dir_ / file_name(request.video_id, request.model_id, request.direction);
    std::ifstream in(path, std::ios::binary);
    if (!in)
      throw Error(Errc::FixtureMissing, "no fixture completion at " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    RawJudgeResponse reply;
    reply.text = buf.str();
    reply.model_id = config.model_id;
    return reply;  // fixtures carry no token accounting
  }

  int call_count() const { return calls_.load(std::memory_order_relaxed); }

 private:
  std::filesystem::path dir_;
  std::atomic<int> calls_{0};
};

}  // namespace argus
