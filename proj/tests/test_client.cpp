#include <memory>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "argus/client.hpp"
#include "argus/transport.hpp"
#include "support.hpp"

using namespace argus;
using argus_test::HasErrc;
using argus_test::ScriptedTransport;
using argus_test::TempDir;

namespace {

JudgeRequest simple_request() {
  JudgeRequest request;
  request.video_id = "vid";
  request.model_id = "model";
  request.direction = Direction::Hallucination;
  request.prompt = "prompt text";
  request.key = "vid__model__H__deadbeef";
  return request;
}

JudgeConfig config_in(const TempDir& dir) {
  JudgeConfig config;
  config.cache_dir = dir.path() / "cache";
  config.backoff_base = 0.25;
  return config;
}

}  // namespace

TEST_CASE("verdict cache stores and reloads entries") {
  TempDir dir;
  VerdictCache cache(dir.path() / "cache");
  CHECK_FALSE(cache.lookup("missing").has_value());

  CacheEntry entry;
  entry.key = "some__key__H__abc";
  entry.raw_text = "Line 1: x\n";
  entry.prompt_tokens = 100;
  entry.completion_tokens = 20;
  entry.judge_model = "gpt-4o";
  entry.created_at = "2024-01-01T00:00:00Z";
  cache.store(entry);

  REQUIRE(cache.contains(entry.key));
  auto loaded = cache.lookup(entry.key);
  REQUIRE(loaded.has_value());
  CHECK(loaded->raw_text == entry.raw_text);
  CHECK(loaded->prompt_tokens == 100);
  CHECK(loaded->completion_tokens == 20);
  CHECK(loaded->judge_model == "gpt-4o");
  CHECK(loaded->created_at == entry.created_at);
}

TEST_CASE("corrupt cache entries raise a schema error") {
  TempDir dir;
  VerdictCache cache(dir.path() / "cache");
  std::filesystem::create_directories(cache.dir());
  argus_test::write_file(cache.path_for("bad"), "{ not json");
  CHECK_THROWS_MATCHES(cache.lookup("bad"), Error, HasErrc(Errc::SchemaError));
}

TEST_CASE("client retries transient failures with exponential backoff") {
  TempDir dir;
  auto transport = std::make_shared<ScriptedTransport>(std::vector<ScriptedTransport::Step>{
      {.text = "", .transient_failure = true},
      {.text = "", .transient_failure = true},
      {.text = "Line 1: ok\n"},
  });
  JudgeClient client(config_in(dir), transport);
  std::vector<double> sleeps;
  client.sleeper = [&sleeps](double s) { sleeps.push_back(s); };

  RawJudgeResponse reply = client.request_verdicts(simple_request());
  CHECK(reply.text == "Line 1: ok\n");
  CHECK_FALSE(reply.retrieved_from_cache);
  CHECK(transport->calls() == 3);
  REQUIRE(sleeps.size() == 2);
  CHECK(sleeps[0] == 0.25);
  CHECK(sleeps[1] == 0.5);
}

TEST_CASE("client gives up after max_retries transient failures") {
  TempDir dir;
  auto transport = std::make_shared<ScriptedTransport>(std::vector<ScriptedTransport::Step>{
      {.text = "", .transient_failure = true},
      {.text = "", .transient_failure = true},
      {.text = "", .transient_failure = true},
  });
  JudgeConfig config = config_in(dir);
  config.max_retries = 2;
  JudgeClient client(config, transport);
  int sleep_count = 0;
  client.sleeper = [&sleep_count](double) { ++sleep_count; };

  CHECK_THROWS_MATCHES(client.request_verdicts(simple_request()), Error,
                       HasErrc(Errc::NetworkExhausted));
  CHECK(transport->calls() == 3);  // initial try + 2 retries
  CHECK(sleep_count == 2);
}

TEST_CASE("non-transient transport failures propagate immediately") {
  TempDir dir;
  auto transport = std::make_shared<ScriptedTransport>(std::vector<ScriptedTransport::Step>{
      {.text = "", .auth_failure = true},
      {.text = "should never be reached"},
  });
  JudgeClient client(config_in(dir), transport);
  client.sleeper = [](double) {};
  CHECK_THROWS_MATCHES(client.request_verdicts(simple_request()), Error,
                       HasErrc(Errc::AuthError));
  CHECK(transport->calls() == 1);
}

TEST_CASE("successful replies are cached and reused without the transport") {
  TempDir dir;
  auto transport = std::make_shared<ScriptedTransport>(std::vector<ScriptedTransport::Step>{
      {.text = "Line 1: cached reply\n"},
      {.text = "Line 1: fresh reply\n"},
  });
  JudgeConfig config = config_in(dir);
  JudgeClient client(config, transport);
  client.sleeper = [](double) {};

  RawJudgeResponse first = client.request_verdicts(simple_request());
  CHECK_FALSE(first.retrieved_from_cache);
  CHECK(first.model_id == "scripted-judge");
  CHECK(transport->calls() == 1);

  RawJudgeResponse second = client.request_verdicts(simple_request());
  CHECK(second.retrieved_from_cache);
  CHECK(second.text == first.text);
  CHECK(second.prompt_tokens == first.prompt_tokens);
  CHECK(transport->calls() == 1);  // untouched

  RawJudgeResponse forced = client.request_verdicts(simple_request(), /*bypass_cache=*/true);
  CHECK_FALSE(forced.retrieved_from_cache);
  CHECK(forced.text == "Line 1: fresh reply\n");
  CHECK(transport->calls() == 2);

  // the bypass reply replaced the cached one
  RawJudgeResponse after = client.request_verdicts(simple_request());
  CHECK(after.retrieved_from_cache);
  CHECK(after.text == "Line 1: fresh reply\n");
}

TEST_CASE("client requires a transport") {
  TempDir dir;
  CHECK_THROWS_MATCHES(JudgeClient(config_in(dir), nullptr), Error, HasErrc(Errc::UsageError));
}

TEST_CASE("fixture transport serves canned completions by pair stem") {
  TempDir dir;
  argus_test::write_file(dir.path() / "vid__model__H.txt", "Line 1: canned\n");
  FixtureTransport transport(dir.path());
  JudgeConfig config;
  RawJudgeResponse reply = transport.send(simple_request(), config);
  CHECK(reply.text == "Line 1: canned\n");
  CHECK(reply.model_id == config.model_id);
  CHECK(reply.prompt_tokens == 0);
  CHECK(transport.call_count() == 1);

  JudgeRequest missing = simple_request();
  missing.direction = Direction::Omission;
  CHECK_THROWS_MATCHES(transport.send(missing, config), Error, HasErrc(Errc::FixtureMissing));
  CHECK(FixtureTransport::file_name("a/b", "m c", Direction::Omission) == "a-b__m-c__O.txt");
}
