#pragma once

#include <cstdlib>
#include <memory>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "argus/errors.hpp"
#include "argus/judge.hpp"
#include "argus/transport.hpp"

namespace argus {

// OpenAI-compatible chat-completions client.  The API key is read from the
// environment variable named in the config at call time and appears only in
// the Authorization header, never in logs or error text.
class HttpTransport : public Transport {
 public:
  RawJudgeResponse send(const JudgeRequest& request, const JudgeConfig& config) override {
    std::string base, path;
    split_endpoint(config.endpoint_url, base, path);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (base.rfind("https://", 0) == 0)
      throw Error(Errc::UsageError,
                  "built without TLS support; use an http:// endpoint or rebuild with OpenSSL");
#endif
    const char* api_key = std::getenv(config.api_key_env.c_str());
    if (!api_key || !*api_key)
      throw Error(Errc::AuthError,
                  "environment variable " + config.api_key_env + " is unset or empty");

    nlohmann::json body = {
        {"model", config.model_id},
        {"temperature", config.temperature},
        {"messages", nlohmann::json::array({nlohmann::json{{"role", "user"},
                                                           {"content", request.prompt}}})},
    };

    httplib::Client client(base);
    client.set_connection_timeout(15, 0);
    client.set_read_timeout(180, 0);
    client.set_write_timeout(30, 0);
    httplib::Headers headers = {{"Authorization", std::string("Bearer ") + api_key}};
    httplib::Result result = client.Post(path, headers, body.dump(), "application/json");

    if (!result)
      throw TransientError(Errc::HttpError,
                           "endpoint unreachable: " + httplib::to_string(result.error()));
    if (result->status == 401 || result->status == 403)
      throw Error(Errc::AuthError, "endpoint rejected credentials with HTTP " +
                                       std::to_string(result->status));
    if (result->status == 429 || result->status >= 500)
      throw TransientError(Errc::HttpError, "HTTP " + std::to_string(result->status));
    if (result->status != 200)
      throw Error(Errc::HttpError, "HTTP " + std::to_string(result->status));

    return parse_completion(result->body, config);
  }

 private:
  static void split_endpoint(const std::string& url, std::string& base, std::string& path) {
    std::size_t scheme = url.find("://");
    if (scheme == std::string::npos)
      throw Error(Errc::UsageError, "endpoint_url must start with http:// or https://");
    std::size_t slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) {
      base = url;
      path = "/";
    } else {
      base = url.substr(0, slash);
      path = url.substr(slash);
    }
  }

  static RawJudgeResponse parse_completion(const std::string& body, const JudgeConfig& config) {
    try {
      nlohmann::json doc = nlohmann::json::parse(body);
      RawJudgeResponse reply;
      reply.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
      if (doc.contains("usage")) {
        reply.prompt_tokens = doc["usage"].value("prompt_tokens", 0LL);
        reply.completion_tokens = doc["usage"].value("completion_tokens", 0LL);
      }
      reply.model_id = doc.value("model", config.model_id);
      return reply;
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::MalformedEndpointReply,
                  std::string("cannot read chat completion: ") + e.what());
    }
  }
};

}  // namespace argus
