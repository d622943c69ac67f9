#include <catch2/catch_amalgamated.hpp>

#include "argus/judge.hpp"
#include "support.hpp"

using namespace argus;
using argus_test::HasErrc;
using argus_test::jt;
using argus_test::sentences;

TEST_CASE("render_numbered produces the prompt caption block") {
  auto s = sentences({"A man walks.", "He waves."});
  CHECK(render_numbered(s) == "1. A man walks.\n2. He waves.");
  CHECK(render_numbered({}) == "");
}

TEST_CASE("build_judge_prompt substitutes all three placeholders") {
  JudgeConfig config;
  auto source = sentences({"Premise one.", "Premise two."});
  auto target = sentences({"Hypothesis one."});
  std::string prompt = build_judge_prompt(source, target, config);
  CHECK(prompt.find("{source_caption}") == std::string::npos);
  CHECK(prompt.find("{target_caption}") == std::string::npos);
  CHECK(prompt.find("{IN_CONTEXT_EXAMPLES}") == std::string::npos);
  CHECK(prompt.find("1. Premise one.\n2. Premise two.") != std::string::npos);
  CHECK(prompt.find("1. Hypothesis one.") != std::string::npos);
  CHECK(prompt.find(config.in_context_examples) != std::string::npos);

  CHECK_THROWS_MATCHES(build_judge_prompt({}, target, config), Error,
                       HasErrc(Errc::EmptySource));
  CHECK_THROWS_MATCHES(build_judge_prompt(source, {}, config), Error,
                       HasErrc(Errc::EmptyTarget));
}

TEST_CASE("judge config identity and validation") {
  JudgeConfig config;
  std::string id = config.template_id();
  CHECK(id.size() == 32);  // 128-bit hex digest

  JudgeConfig other = config;
  other.in_context_examples = "different exemplars";
  CHECK(other.template_id() != id);

  other.prompt_template_id = "custom-id";
  CHECK(other.template_id() == "custom-id");

  JudgeConfig bad = config;
  bad.temperature = -1;
  CHECK_THROWS_MATCHES(bad.validate(), Error, HasErrc(Errc::UsageError));
  bad = config;
  bad.max_retries = -1;
  CHECK_THROWS_MATCHES(bad.validate(), Error, HasErrc(Errc::UsageError));
}

TEST_CASE("cache_key is deterministic and distinguishes every input") {
  JudgeConfig config;
  std::string base = cache_key("vid 1", "model/a", Direction::Hallucination, config,
                               "1. source.", "1. target.");
  CHECK(base == cache_key("vid 1", "model/a", Direction::Hallucination, config, "1. source.",
                          "1. target."));
  CHECK(base.rfind("vid-1__model-a__H__", 0) == 0);

  CHECK(base != cache_key("vid 1", "model/a", Direction::Omission, config, "1. source.",
                          "1. target."));
  CHECK(base != cache_key("vid 1", "model/b", Direction::Hallucination, config, "1. source.",
                          "1. target."));
  CHECK(base != cache_key("vid 1", "model/a", Direction::Hallucination, config, "1. source!",
                          "1. target."));

  JudgeConfig warm = config;
  warm.temperature = 0.7;
  CHECK(base != cache_key("vid 1", "model/a", Direction::Hallucination, warm, "1. source.",
                          "1. target."));
  JudgeConfig other_template = config;
  other_template.prompt_template_id = "other";
  CHECK(base != cache_key("vid 1", "model/a", Direction::Hallucination, other_template,
                          "1. source.", "1. target."));

  CHECK_THROWS_MATCHES(
      cache_key("", "m", Direction::Hallucination, config, "s", "t"), Error,
      HasErrc(Errc::MissingId));
}

TEST_CASE("parse_judge_response reads the canonical block format") {
  auto target = sentences({"A man chops onions.", "He cries loudly."});
  std::string text =
      "Line 1: A man chops onions.\n"
      "    - Type: dynamic-action\n"
      "    - Evidence: \"He chops onions on a wooden board.\"\n"
      "    - Reasoning: Stated directly.\n"
      "    - Verdict: entailment\n"
      "Line 2: He cries loudly.\n"
      "    - Type: visual-description\n"
      "    - Evidence: \"\"\n"
      "    - Reasoning: Never mentioned.\n"
      "    - Verdict: undetermined\n";
  auto judged = parse_judge_response(text, target);
  REQUIRE(judged.size() == 2);
  CHECK(judged[0].stype == SentenceType::DA);
  CHECK(judged[0].verdict == Verdict::EN);
  CHECK(judged[0].evidence_text == "He chops onions on a wooden board.");
  CHECK(judged[0].reasoning == "Stated directly.");
  CHECK_FALSE(judged[0].evidence_index.has_value());  // resolution is a separate step
  CHECK(judged[1].evidence_text.empty());
  CHECK(judged[1].verdict == Verdict::UD);
  CHECK(judged[1].sentence.text == "He cries loudly.");
}

TEST_CASE("parse_judge_response tolerates markdown dressing and wrapped fields") {
  auto target = sentences({"First.", "Second."});
  std::string text =
      "Sure! Here is the analysis:\n"
      "```\n"
      "**Line 1:** First.\n"
      "  * **Type**: Dynamic Action\n"
      "  * **Evidence**: 'quoted evidence'\n"
      "  * **Reasoning**: wraps onto\n"
      "    the next line\n"
      "  * **Verdict**: **entailment**\n"
      "```\n"
      "- Line 2: Second.\n"
      "- Type: summary\n"
      "- Evidence: \"\"\n"
      "- Reasoning: short\n"
      "- Verdict: Undetermined\n";
  auto judged = parse_judge_response(text, target);
  REQUIRE(judged.size() == 2);
  CHECK(judged[0].stype == SentenceType::DA);
  CHECK(judged[0].verdict == Verdict::EN);
  CHECK(judged[0].evidence_text == "quoted evidence");
  CHECK(judged[0].reasoning == "wraps onto the next line");
  CHECK(judged[1].stype == SentenceType::SUM);
  CHECK(judged[1].verdict == Verdict::UD);
}

TEST_CASE("parse_judge_response enforces block count and order") {
  auto target = sentences({"One.", "Two.", "Three."});
  std::string two_blocks =
      "Line 1: One.\n- Type: summary\n- Evidence: \"\"\n- Reasoning: r\n- Verdict: entailment\n"
      "Line 2: Two.\n- Type: summary\n- Evidence: \"\"\n- Reasoning: r\n- Verdict: entailment\n";
  CHECK_THROWS_MATCHES(parse_judge_response(two_blocks, target), Error,
                       HasErrc(Errc::LineCountMismatch));

  std::string out_of_order =
      "Line 1: One.\n- Type: summary\n- Evidence: \"\"\n- Reasoning: r\n- Verdict: entailment\n"
      "Line 3: Three.\n- Type: summary\n- Evidence: \"\"\n- Reasoning: r\n- Verdict: entailment\n"
      "Line 2: Two.\n- Type: summary\n- Evidence: \"\"\n- Reasoning: r\n- Verdict: entailment\n";
  CHECK_THROWS_MATCHES(parse_judge_response(out_of_order, target), Error,
                       HasErrc(Errc::LineCountMismatch));
}

TEST_CASE("parse_judge_response requires all four fields") {
  auto target = sentences({"One."});
  std::string no_verdict = "Line 1: One.\n- Type: summary\n- Evidence: \"\"\n- Reasoning: r\n";
  CHECK_THROWS_MATCHES(parse_judge_response(no_verdict, target), Error,
                       HasErrc(Errc::MissingField));
  std::string no_evidence = "Line 1: One.\n- Type: summary\n- Reasoning: r\n- Verdict: entailment\n";
  CHECK_THROWS_MATCHES(parse_judge_response(no_evidence, target), Error,
                       HasErrc(Errc::MissingField));
}

TEST_CASE("parse_judge_response rejects unknown labels and empty replies") {
  auto target = sentences({"One."});
  std::string bad_type =
      "Line 1: One.\n- Type: action-shot\n- Evidence: \"\"\n- Reasoning: r\n- Verdict: entailment\n";
  CHECK_THROWS_MATCHES(parse_judge_response(bad_type, target), Error,
                       HasErrc(Errc::UnknownLabel));
  RawJudgeResponse raw;
  CHECK_THROWS_MATCHES(parse_judge_response(raw, target), Error,
                       HasErrc(Errc::MalformedEndpointReply));
}

TEST_CASE("render and parse are inverse on the block format") {
  std::vector<JudgedTarget> doc;
  int idx = 1;
  for (SentenceType t : {SentenceType::SUM, SentenceType::VD, SentenceType::DA}) {
    for (Verdict v : {Verdict::EN, Verdict::CON, Verdict::UD}) {
      JudgedTarget one = jt(idx, t, v, std::nullopt, "evidence " + std::to_string(idx),
                            "reasoning " + std::to_string(idx));
      one.sentence.text = "Target sentence " + std::to_string(idx) + ".";
      doc.push_back(one);
      ++idx;
    }
  }
  std::string rendered = render_judged_targets(doc);
  std::vector<Sentence> target;
  for (const JudgedTarget& t : doc) target.push_back(t.sentence);
  auto parsed = parse_judge_response(rendered, target);
  REQUIRE(parsed.size() == doc.size());
  CHECK(render_judged_targets(parsed) == rendered);
  for (std::size_t i = 0; i < doc.size(); ++i) {
    CHECK(parsed[i].stype == doc[i].stype);
    CHECK(parsed[i].verdict == doc[i].verdict);
    CHECK(parsed[i].evidence_text == doc[i].evidence_text);
    CHECK(parsed[i].reasoning == doc[i].reasoning);
  }
}

TEST_CASE("evidence resolution cascade") {
  auto source = sentences({
      "A woman stirs a pot of pasta on the stove.",
      "She calls the young boy over to the kitchen.",
      "The boy climbs onto a wooden stool.",
      "The boy puts on a white chef's hat and waves.",
  });

  SECTION("exact substring, unique") {
    CHECK(resolve_evidence("climbs onto a wooden stool", source) == 3);
    CHECK(resolve_evidence("A woman stirs a pot of pasta on the stove.", source) == 1);
  }
  SECTION("exact substring, ambiguous -> null") {
    CHECK_FALSE(resolve_evidence("The boy", source).has_value());
  }
  SECTION("punctuation-stripped containment, unique") {
    CHECK(resolve_evidence("boy puts on a white chefs hat", source) == 4);
    CHECK(resolve_evidence("CLIMBS ONTO A WOODEN STOOL!", source) == 3);
  }
  SECTION("token Jaccard at or above one half, unique") {
    // {the, woman, calls, boy, to, kitchen} vs sentence 2: overlap 5, union 9.
    CHECK(resolve_evidence("the woman calls the boy to the kitchen", source) == 2);
  }
  SECTION("below the Jaccard threshold -> null") {
    CHECK_FALSE(resolve_evidence("the boy strolls toward the refrigerator", source).has_value());
  }
  SECTION("empty or punctuation-only evidence -> null") {
    CHECK_FALSE(resolve_evidence("", source).has_value());
    CHECK_FALSE(resolve_evidence("   ", source).has_value());
    CHECK_FALSE(resolve_evidence("?!...", source).has_value());
  }
  SECTION("exact-substring tie -> null") {
    auto twins = sentences({"a red ball", "a red wall", "something else entirely"});
    CHECK_FALSE(resolve_evidence("a red", twins).has_value());
  }
  SECTION("Jaccard tie -> null") {
    // "ball red" is a substring of neither sentence but scores 2/3 against both.
    auto twins = sentences({"the red ball", "a red ball", "something else entirely"});
    CHECK_FALSE(resolve_evidence("ball red", twins).has_value());
  }
  SECTION("substring hit that shares no whole token -> null") {
    auto corpus = sentences({"A man is cooking."});
    CHECK_FALSE(resolve_evidence("ing.", corpus).has_value());
  }
  SECTION("empty premise is refused") {
    CHECK_THROWS_MATCHES(resolve_evidence("x", {}), Error, HasErrc(Errc::EmptySource));
  }
}

TEST_CASE("resolve_all_evidence fills indices in place") {
  auto source = sentences({"A man walks.", "He waves."});
  std::vector<JudgedTarget> judged = {
      jt(1, SentenceType::DA, Verdict::EN, std::nullopt, "He waves."),
      jt(2, SentenceType::DA, Verdict::EN, std::nullopt, "unrelated text entirely"),
  };
  resolve_all_evidence(judged, source);
  CHECK(judged[0].evidence_index == 2);
  CHECK_FALSE(judged[1].evidence_index.has_value());
}

TEST_CASE("estimate_judge_cost uses per-million rates") {
  TokenRates rates{2.50, 10.0};
  CHECK(estimate_judge_cost(2464, 0, rates) == 0.00616);
  CHECK(estimate_judge_cost(2464, 640, rates) == 0.01256);
  CHECK(estimate_judge_cost(0, 0, rates) == 0.0);
  CHECK_THROWS_MATCHES(estimate_judge_cost(-1, 0, rates), Error,
                       HasErrc(Errc::InconsistentInput));
  CHECK_THROWS_MATCHES(estimate_judge_cost(1, 0, TokenRates{-1, 0}), Error,
                       HasErrc(Errc::InconsistentInput));
}
