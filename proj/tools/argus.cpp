// argus: score free-form video captions against human references with an
// LLM entailment judge.  Subcommands cover judging (with caching and offline
// fixtures), scoring (hallucination and omission costs), an exhaustive
// alignment oracle, and report aggregation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "argus/errors.hpp"
#include "argus/http_transport.hpp"
#include "argus/pipeline.hpp"

namespace {

std::vector<argus::Direction> parse_directions(const std::string& flag) {
  if (flag == "h") return {argus::Direction::Hallucination};
  if (flag == "o") return {argus::Direction::Omission};
  return {argus::Direction::Hallucination, argus::Direction::Omission};
}

argus::Direction parse_single_direction(const std::string& flag) {
  if (flag == "h") return argus::Direction::Hallucination;
  if (flag == "o") return argus::Direction::Omission;
  throw argus::Error(argus::Errc::UsageError, "this mode needs --direction h or o");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw argus::Error(argus::Errc::UsageError, "cannot read file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_failures(const std::vector<argus::PairFailure>& failures) {
  for (const argus::PairFailure& f : failures)
    std::cerr << "FAIL " << f.video_id << " / " << f.model_id << " / " << f.direction << ": "
              << f.error << '\n';
}

struct JudgeCli {
  std::string dataset;
  std::string judged_dir = "judged";
  std::vector<std::string> models;
  std::string direction = "both";
  std::string judge_model = "gpt-4o";
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  int max_retries = 3;
  double backoff_base = 0.5;
  std::string cache_dir = ".argus-cache";
  std::string offline_fixtures;
  std::string in_context_file;
  bool pre_segmented = false;
  int parallelism = 4;
};

int cmd_judge(const JudgeCli& cli) {
  argus::JudgeRunOptions options;
  options.dataset_path = cli.dataset;
  options.judged_dir = cli.judged_dir;
  options.model_filter = cli.models;
  options.directions = parse_directions(cli.direction);
  options.line_mode = cli.pre_segmented;
  options.parallelism = cli.parallelism;
  options.config.model_id = cli.judge_model;
  options.config.endpoint_url = cli.endpoint;
  options.config.api_key_env = cli.api_key_env;
  options.config.temperature = cli.temperature;
  options.config.max_retries = cli.max_retries;
  options.config.backoff_base = cli.backoff_base;
  options.config.cache_dir = cli.cache_dir;
  if (!cli.in_context_file.empty())
    options.config.in_context_examples = read_text_file(cli.in_context_file);
  if (cli.offline_fixtures.empty())
    options.transport = std::make_shared<argus::HttpTransport>();
  else
    options.transport = std::make_shared<argus::FixtureTransport>(cli.offline_fixtures);

  argus::JudgeRunResult result = argus::run_judge(options);
  std::cout << "judged " << (result.pairs - static_cast<int>(result.failures.size())) << "/"
            << result.pairs << " pairs into " << cli.judged_dir << '\n';
  if (!result.failures.empty()) {
    print_failures(result.failures);
    std::cerr << "failure manifest: "
              << (std::filesystem::path(cli.judged_dir) / "errors.json").string() << '\n';
    return 1;
  }
  return 0;
}

struct ScoreCli {
  std::string dataset;
  std::string judged_dir = "judged";
  std::string out = "scores.jsonl";
  std::string summary;
  std::string lambda = "0.1";
  std::string direction = "both";
  std::vector<std::string> models;
  bool pre_segmented = false;
};

int cmd_score(const ScoreCli& cli) {
  argus::ScoreRunOptions options;
  options.dataset_path = cli.dataset;
  options.judged_dir = cli.judged_dir;
  options.output_path = cli.out;
  if (!cli.summary.empty()) options.summary_path = cli.summary;
  options.model_filter = cli.models;
  options.directions = parse_directions(cli.direction);
  options.line_mode = cli.pre_segmented;
  options.lambda = argus::Lambda::parse(cli.lambda);

  argus::ScoreRunResult result = argus::run_score(options);
  std::filesystem::path summary = options.summary_path.empty()
                                      ? argus::default_summary_path(options.output_path)
                                      : options.summary_path;
  std::cout << "scored " << result.records.size() << " records -> " << cli.out << " and "
            << summary.string() << '\n';
  if (!result.failures.empty()) {
    print_failures(result.failures);
    return 1;
  }
  return 0;
}

struct OracleCli {
  std::string judged_dir;
  std::string out;
  std::string lambda = "0.1";
  std::uint64_t max_states = 1000000;
  int random_instances = 0;
  int random_max_n = 8;
  int random_max_m = 6;
  std::uint64_t seed = 12345;
};

int cmd_oracle(const OracleCli& cli) {
  if (cli.judged_dir.empty() && cli.random_instances == 0)
    throw argus::Error(argus::Errc::UsageError,
                       "oracle needs --judged-dir or --random-instances");
  argus::OracleRunOptions options;
  options.judged_dir = cli.judged_dir;
  options.output_path = cli.out;
  options.lambda = argus::Lambda::parse(cli.lambda);
  options.max_states = cli.max_states;
  options.random_instances = cli.random_instances;
  options.random_max_n = cli.random_max_n;
  options.random_max_m = cli.random_max_m;
  options.seed = cli.seed;

  argus::OracleRunResult result = argus::run_oracle(options);
  std::printf("instances=%d skipped=%d positive_gaps=%d max_gap=%.6f\n", result.instances,
              result.skipped, result.positive_gaps, result.max_gap);
  return 0;
}

struct ReportCli {
  std::string mode;
  std::vector<std::string> inputs;
  std::string out = "report.csv";
  std::string direction = "h";
  std::string default_prompt;
};

int cmd_report(const ReportCli& cli) {
  argus::ReportRunOptions options;
  options.mode = cli.mode;
  options.output_path = cli.out;
  options.direction = parse_single_direction(cli.direction);
  options.default_prompt = cli.default_prompt;
  for (const std::string& input : cli.inputs) {
    std::size_t eq = input.find('=');
    argus::ReportInput ri;
    if (eq == std::string::npos) {
      ri.path = input;
      ri.label = ri.path.stem().string();
    } else {
      ri.label = input.substr(0, eq);
      ri.path = input.substr(eq + 1);
    }
    options.inputs.push_back(std::move(ri));
  }
  argus::run_report(options);
  std::cout << cli.mode << " report -> " << cli.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Caption entailment scoring: hallucination and omission costs"};
  app.require_subcommand(1);

  JudgeCli judge_cli;
  CLI::App* judge = app.add_subcommand("judge", "Collect judge verdicts for caption pairs");
  judge->add_option("--dataset", judge_cli.dataset, "JSONL dataset of caption pairs")->required();
  judge->add_option("--judged-dir", judge_cli.judged_dir, "Directory for judged documents");
  judge->add_option("--models", judge_cli.models, "Only judge these model ids");
  judge->add_option("--direction", judge_cli.direction, "h, o or both")
      ->check(CLI::IsMember({"h", "o", "both"}));
  judge->add_option("--judge-model", judge_cli.judge_model, "Judge model id");
  judge->add_option("--endpoint", judge_cli.endpoint, "Chat-completions endpoint URL");
  judge->add_option("--api-key-env", judge_cli.api_key_env,
                    "Environment variable holding the API key");
  judge->add_option("--temperature", judge_cli.temperature, "Judge sampling temperature")
      ->check(CLI::NonNegativeNumber);
  judge->add_option("--max-retries", judge_cli.max_retries, "Transient-failure retries")
      ->check(CLI::NonNegativeNumber);
  judge->add_option("--backoff-base", judge_cli.backoff_base, "Base backoff seconds")
      ->check(CLI::NonNegativeNumber);
  judge->add_option("--cache-dir", judge_cli.cache_dir, "Verdict cache directory");
  judge->add_option("--offline-fixtures", judge_cli.offline_fixtures,
                    "Serve completions from this directory instead of HTTP");
  judge->add_option("--in-context-file", judge_cli.in_context_file,
                    "File with in-context examples for the prompt");
  judge->add_flag("--pre-segmented", judge_cli.pre_segmented,
                  "Captions are newline-separated sentences");
  judge->add_option("--parallelism", judge_cli.parallelism, "Concurrent judge calls")
      ->check(CLI::PositiveNumber);

  ScoreCli score_cli;
  CLI::App* score = app.add_subcommand("score", "Score judged documents into reports");
  score->add_option("--dataset", score_cli.dataset, "JSONL dataset of caption pairs")->required();
  score->add_option("--judged-dir", score_cli.judged_dir, "Directory of judged documents");
  score->add_option("--out", score_cli.out, "Output JSONL report path");
  score->add_option("--summary", score_cli.summary, "Output CSV summary path");
  score->add_option("--lambda", score_cli.lambda, "Ordering weight in [0, 1]");
  score->add_option("--direction", score_cli.direction, "h, o or both")
      ->check(CLI::IsMember({"h", "o", "both"}));
  score->add_option("--models", score_cli.models, "Only score these model ids");
  score->add_flag("--pre-segmented", score_cli.pre_segmented,
                  "Captions are newline-separated sentences");

  OracleCli oracle_cli;
  CLI::App* oracle = app.add_subcommand("oracle", "Compare the alignment DP to brute force");
  oracle->add_option("--judged-dir", oracle_cli.judged_dir, "Judged documents to audit");
  oracle->add_option("--out", oracle_cli.out, "Per-instance gap CSV path");
  oracle->add_option("--lambda", oracle_cli.lambda, "Ordering weight in [0, 1]");
  oracle->add_option("--max-states", oracle_cli.max_states, "Enumeration bound (assignments)");
  oracle->add_option("--random-instances", oracle_cli.random_instances,
                     "Audit this many synthetic instances instead of judged files");
  oracle->add_option("--random-n", oracle_cli.random_max_n, "Max hypothesis sentences");
  oracle->add_option("--random-m", oracle_cli.random_max_m, "Max premise sentences");
  oracle->add_option("--seed", oracle_cli.seed, "Synthetic instance seed");

  ReportCli report_cli;
  CLI::App* report = app.add_subcommand("report", "Aggregate score reports");
  report->add_option("mode", report_cli.mode, "summary, sensitivity or judge-agreement")
      ->required()
      ->check(CLI::IsMember({"summary", "sensitivity", "judge-agreement"}));
  report
      ->add_option("inputs", report_cli.inputs,
                   "Report files, optionally labeled as label=path")
      ->required();
  report->add_option("--out", report_cli.out, "Output CSV path");
  report->add_option("--direction", report_cli.direction, "Direction to aggregate (h or o)")
      ->check(CLI::IsMember({"h", "o"}));
  report->add_option("--default-prompt", report_cli.default_prompt,
                     "Label of the default prompt (sensitivity mode)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (judge->parsed()) return cmd_judge(judge_cli);
    if (score->parsed()) return cmd_score(score_cli);
    if (oracle->parsed()) return cmd_oracle(oracle_cli);
    if (report->parsed()) return cmd_report(report_cli);
  } catch (const argus::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
