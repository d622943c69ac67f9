#include <catch2/catch_amalgamated.hpp>

#include "argus/alignment.hpp"
#include "argus/analytics.hpp"
#include "support.hpp"

using namespace argus;
using argus_test::HasErrc;
using argus_test::jt;

namespace {

double type_total(const CostBreakdown& bd) {
  double sum = 0;
  for (const auto& [key, value] : bd.by_sentence_type) sum += value;
  return sum;
}

}  // namespace

TEST_CASE("breakdown attributes every unit of base cost") {
  Lambda lambda = Lambda::parse("0.1");
  std::vector<JudgedTarget> judged = {
      jt(1, SentenceType::SUM, Verdict::EN),
      jt(2, SentenceType::DA, Verdict::EN, 1),
      jt(3, SentenceType::DA, Verdict::EN, 3),
      jt(4, SentenceType::VD, Verdict::CON),
  };
  AlignmentOutcome outcome = run_alignment_dp(judged, 3, lambda);
  CostBreakdown bd = breakdown_costs(outcome, judged);

  CHECK(bd.base_cost == 1.0);
  CHECK(bd.order_penalty == 0.0);
  CHECK(bd.by_sentence_type.at("VD") == 1.0);
  CHECK(bd.by_sentence_type.at("SUM") == 0.0);
  CHECK(bd.by_sentence_type.at("DA") == 0.0);
  CHECK(bd.by_verdict.at("CON") == 1.0);
  CHECK(bd.by_verdict.at("UD") == 0.0);
  CHECK(type_total(bd) + bd.order_penalty == outcome.raw_total);

  REQUIRE(bd.per_sentence_flags.size() == 4);
  CHECK_FALSE(bd.per_sentence_flags[0].costed);
  CHECK(bd.per_sentence_flags[0].reason.empty());
  CHECK(bd.per_sentence_flags[3].costed);
  CHECK(bd.per_sentence_flags[3].reason == "contradiction");
}

TEST_CASE("breakdown flags inversion participants and unresolved evidence") {
  Lambda lambda = Lambda::parse("0.1");
  std::vector<JudgedTarget> judged = {
      jt(1, SentenceType::DA, Verdict::EN, 3),
      jt(2, SentenceType::DA, Verdict::EN, 1),
      jt(3, SentenceType::DA, Verdict::EN),  // unresolved evidence
      jt(4, SentenceType::VD, Verdict::UD),
  };
  AlignmentOutcome outcome = run_alignment_dp(judged, 3, lambda);
  CostBreakdown bd = breakdown_costs(outcome, judged);

  CHECK(bd.base_cost == 2.0);     // unresolved DA + undetermined VD
  CHECK(bd.order_penalty == 0.1); // the (3, 1) inversion
  CHECK(type_total(bd) + bd.order_penalty == outcome.raw_total);
  CHECK(bd.by_verdict.at("UD") == 1.0);
  CHECK(bd.by_sentence_type.at("DA") == 1.0);
  CHECK(bd.by_sentence_type.at("VD") == 1.0);

  CHECK(bd.per_sentence_flags[1].costed);  // later element of the inversion
  CHECK(bd.per_sentence_flags[1].reason == "misordered-evidence");
  CHECK(bd.per_sentence_flags[2].costed);
  CHECK(bd.per_sentence_flags[2].reason == "unresolved-evidence");
  CHECK(bd.per_sentence_flags[3].reason == "undetermined");
}

TEST_CASE("breakdown rejects a mismatched outcome") {
  Lambda lambda = Lambda::parse("0.1");
  std::vector<JudgedTarget> judged = {jt(1, SentenceType::SUM, Verdict::EN)};
  AlignmentOutcome outcome = run_alignment_dp(judged, 2, lambda);
  judged.push_back(jt(2, SentenceType::SUM, Verdict::EN));
  CHECK_THROWS_MATCHES(breakdown_costs(outcome, judged), Error,
                       HasErrc(Errc::InconsistentInput));
}

TEST_CASE("aggregate_models averages a rectangular panel") {
  std::vector<VideoScore> records = {
      {"v1", "alpha", Direction::Hallucination, 40.0, 4},
      {"v2", "alpha", Direction::Hallucination, 60.0, 6},
      {"v1", "alpha", Direction::Omission, 10.0, 3},
      {"v2", "alpha", Direction::Omission, 30.0, 3},
      {"v1", "beta", Direction::Hallucination, 20.0, 2},
      {"v2", "beta", Direction::Hallucination, 20.0, 4},
      {"v1", "beta", Direction::Omission, 50.0, 3},
      {"v2", "beta", Direction::Omission, 70.0, 3},
  };
  auto summaries = aggregate_models(records);
  REQUIRE(summaries.size() == 2);
  CHECK(summaries[0].model_id == "alpha");
  REQUIRE(summaries[0].mean_h.has_value());
  CHECK(*summaries[0].mean_h == 50.0);
  CHECK(*summaries[0].mean_o == 20.0);
  CHECK(summaries[0].mean_caption_sentences == 5.0);
  CHECK(summaries[0].video_count == 2);
  CHECK(summaries[1].model_id == "beta");
  CHECK(*summaries[1].mean_h == 20.0);
  CHECK(*summaries[1].mean_o == 60.0);
  REQUIRE(summaries[0].records.size() == 4);
  CHECK(summaries[0].records[0].video_id == "v1");
  CHECK(summaries[0].records[0].direction == Direction::Hallucination);
  CHECK(summaries[0].records[1].direction == Direction::Omission);
}

TEST_CASE("aggregate_models rejects duplicates and ragged panels") {
  std::vector<VideoScore> dup = {
      {"v1", "alpha", Direction::Hallucination, 40.0, 4},
      {"v1", "alpha", Direction::Hallucination, 42.0, 4},
  };
  CHECK_THROWS_MATCHES(aggregate_models(dup), Error, HasErrc(Errc::DuplicateVideoModelKey));

  std::vector<VideoScore> ragged = {
      {"v1", "alpha", Direction::Hallucination, 40.0, 4},
      {"v2", "alpha", Direction::Hallucination, 60.0, 4},
      {"v1", "beta", Direction::Hallucination, 20.0, 2},
  };
  CHECK_THROWS_MATCHES(aggregate_models(ragged), Error, HasErrc(Errc::UnbalancedPanel));
}

TEST_CASE("pearson hits the exact identity cases") {
  std::vector<double> x = {1, 2, 3};
  std::vector<double> same = {10, 20, 30};
  std::vector<double> reversed = {3, 2, 1};
  std::vector<double> swapped = {1, 3, 2};
  CHECK(pearson(x, same) == 1.0);
  CHECK(pearson(x, reversed) == -1.0);
  CHECK(pearson(x, x) == 1.0);
  CHECK(pearson(x, swapped) == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("pearson rejects degenerate input") {
  std::vector<double> x = {1, 2, 3};
  std::vector<double> constant = {5, 5, 5};
  std::vector<double> one = {1};
  std::vector<double> two = {1, 2};
  CHECK_THROWS_MATCHES(pearson(x, constant), Error, HasErrc(Errc::DegenerateInput));
  CHECK_THROWS_MATCHES(pearson(one, one), Error, HasErrc(Errc::DegenerateInput));
  CHECK_THROWS_MATCHES(pearson(x, two), Error, HasErrc(Errc::DegenerateInput));
}

TEST_CASE("average_ranks assigns average positions to ties") {
  std::vector<double> xs = {10.0, 30.0, 10.0, 20.0};
  auto ranks = average_ranks(xs);
  REQUIRE(ranks.size() == 4);
  CHECK(ranks[0] == 1.5);
  CHECK(ranks[1] == 4.0);
  CHECK(ranks[2] == 1.5);
  CHECK(ranks[3] == 3.0);
}

TEST_CASE("judge agreement correlates rank vectors across judges") {
  std::map<std::string, std::map<std::string, double>> scores = {
      {"judge-a", {{"m1", 10.0}, {"m2", 20.0}, {"m3", 30.0}}},
      {"judge-b", {{"m1", 11.0}, {"m2", 27.0}, {"m3", 41.0}}},  // same ranking
      {"judge-c", {{"m1", 33.0}, {"m2", 22.0}, {"m3", 11.0}}},  // reversed ranking
  };
  JudgeAgreement agreement = judge_agreement_matrix(scores);
  REQUIRE(agreement.judges == std::vector<std::string>{"judge-a", "judge-b", "judge-c"});
  REQUIRE(agreement.models == std::vector<std::string>{"m1", "m2", "m3"});
  CHECK(agreement.rank_pearson[0][1] == 1.0);
  CHECK(agreement.rank_pearson[0][2] == -1.0);
  CHECK(agreement.rank_pearson[1][2] == -1.0);
  CHECK(agreement.rank_pearson[1][0] == 1.0);  // symmetric
  CHECK(agreement.rank_pearson[0][0] == 1.0);  // unit diagonal
  CHECK(agreement.raw_pearson[0][1] > 0.99);
  CHECK(agreement.raw_pearson[0][2] < -0.99);
}

TEST_CASE("judge agreement rejects small or ragged panels") {
  std::map<std::string, std::map<std::string, double>> one_judge = {
      {"judge-a", {{"m1", 1.0}, {"m2", 2.0}, {"m3", 3.0}}},
  };
  CHECK_THROWS_MATCHES(judge_agreement_matrix(one_judge), Error,
                       HasErrc(Errc::DegenerateInput));

  std::map<std::string, std::map<std::string, double>> two_models = {
      {"judge-a", {{"m1", 1.0}, {"m2", 2.0}}},
      {"judge-b", {{"m1", 2.0}, {"m2", 1.0}}},
  };
  CHECK_THROWS_MATCHES(judge_agreement_matrix(two_models), Error,
                       HasErrc(Errc::DegenerateInput));

  std::map<std::string, std::map<std::string, double>> ragged = {
      {"judge-a", {{"m1", 1.0}, {"m2", 2.0}, {"m3", 3.0}}},
      {"judge-b", {{"m1", 1.0}, {"m2", 2.0}, {"mX", 3.0}}},
  };
  CHECK_THROWS_MATCHES(judge_agreement_matrix(ragged), Error, HasErrc(Errc::UnbalancedPanel));
}

TEST_CASE("mean_stderr uses the sample standard deviation") {
  std::vector<double> runs = {70.0, 74.0, 74.1};
  MeanStderr stat = mean_stderr(runs);
  CHECK(stat.runs == 3);
  CHECK(stat.mean == Catch::Approx(72.7).epsilon(1e-12));
  CHECK(stat.stderr_value == Catch::Approx(1.3503086067019388).epsilon(1e-12));
  std::vector<double> one = {1.0};
  CHECK_THROWS_MATCHES(mean_stderr(one), Error, HasErrc(Errc::DegenerateInput));
}

TEST_CASE("prompt sensitivity summarizes intra and inter prompt spread") {
  std::map<std::string, std::vector<double>> single = {
      {"default", {70.0, 74.0, 74.1}},
  };
  auto table = prompt_sensitivity(single, "default");
  REQUIRE(table.count("intra-prompt") == 1);
  CHECK(table.count("inter-prompt") == 0);
  CHECK(table.at("intra-prompt").mean == Catch::Approx(72.7).epsilon(1e-12));

  std::map<std::string, std::vector<double>> multi = {
      {"default", {70.0, 74.0, 74.1}},
      {"variant-a", {80.0, 82.0}},
      {"variant-b", {60.0}},
  };
  auto multi_table = prompt_sensitivity(multi, "default");
  REQUIRE(multi_table.count("inter-prompt") == 1);
  CHECK(multi_table.at("inter-prompt").runs == 3);  // one mean per prompt
  // means: 72.7, 81, 60
  CHECK(multi_table.at("inter-prompt").mean == Catch::Approx((72.7 + 81.0 + 60.0) / 3.0));

  CHECK_THROWS_MATCHES(prompt_sensitivity(single, "absent"), Error,
                       HasErrc(Errc::DegenerateInput));
}
