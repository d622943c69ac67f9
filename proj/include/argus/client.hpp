#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <thread>
#include <utility>

#include "argus/cache.hpp"
#include "argus/errors.hpp"
#include "argus/judge.hpp"
#include "argus/transport.hpp"

namespace argus {

// Cache-fronted judge access with a bounded exponential-backoff retry loop.
// Thread-safe for concurrent request_verdicts calls: the cache writes
// atomically and the transport implementations keep no per-call state.
class JudgeClient {
 public:
  JudgeClient(JudgeConfig config, std::shared_ptr<Transport> transport)
      : config_(std::move(config)), transport_(std::move(transport)), cache_(config_.cache_dir) {
    config_.validate();
    if (!transport_) throw Error(Errc::UsageError, "JudgeClient needs a transport");
  }

  const JudgeConfig& config() const { return config_; }
  const VerdictCache& cache() const { return cache_; }

  // Overridable for tests; production sleeps the requested seconds.
  std::function<void(double)> sleeper = [](double seconds) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  };

  // Returns the cached completion when one exists (no network touched);
  // otherwise calls the transport, retrying transient failures up to
  // max_retries times, and stores the reply before returning it.
  RawJudgeResponse request_verdicts(const JudgeRequest& request, bool bypass_cache = false) {
    if (!bypass_cache) {
      if (std::optional<CacheEntry> hit = cache_.lookup(request.key)) {
        RawJudgeResponse reply;
        reply.text = hit->raw_text;
        reply.prompt_tokens = hit->prompt_tokens;
        reply.completion_tokens = hit->completion_tokens;
        reply.model_id = hit->judge_model;
        reply.retrieved_from_cache = true;
        return reply;
      }
    }
    RawJudgeResponse reply;
    for (int attempt = 0;; ++attempt) {
      try {
        reply = transport_->send(request, config_);
        break;
      } catch (const TransientError& e) {
        if (attempt >= config_.max_retries)
          throw Error(Errc::NetworkExhausted,
                      "gave up after " + std::to_string(attempt + 1) +
                          " attempts; last failure: " + e.what());
        sleeper(config_.backoff_base * std::pow(2.0, attempt));
      }
    }
    CacheEntry entry;
    entry.key = request.key;
    entry.raw_text = reply.text;
    entry.prompt_tokens = reply.prompt_tokens;
    entry.completion_tokens = reply.completion_tokens;
    entry.judge_model = reply.model_id.empty() ? config_.model_id : reply.model_id;
    entry.created_at = iso8601_now();
    cache_.store(entry);
    reply.model_id = entry.judge_model;
    reply.retrieved_from_cache = false;
    return reply;
  }

 private:
  JudgeConfig config_;
  std::shared_ptr<Transport> transport_;
  VerdictCache cache_;
};

}  // namespace argus
