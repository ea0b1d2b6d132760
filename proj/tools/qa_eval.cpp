// Copyright 2026 The qaeval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qa-eval: batch QA evaluation, statistics and metric routing.
//
//   qa-eval evaluate --dataset data.jsonl --out results/
//   qa-eval analyze  --matrix results/scores.csv --dataset data.jsonl --method all
//   qa-eval classify --dataset data.jsonl
//   qa-eval route    --dataset data.jsonl [--routing routes.json]

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qaeval/qaeval.hpp"

namespace {

using qaeval::cli::RunConfig;

struct Flags {
  std::string dataset;
  std::string matrix;
  std::string format;
  std::string metrics;
  std::string method = "pearson";
  std::string routing;
  std::string grader_endpoint;
  std::string grader_id = "external_grader";
  long grader_timeout_ms = 30000;
  int grader_retries = 2;
  std::uint64_t seed = 0;
  std::size_t bins = 10;
  std::size_t min_support = 3;
  std::string out = ".";
  bool strict = false;
  bool reclassify = false;
  bool dump_routing = false;
  std::size_t threads = 1;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

RunConfig to_config(const Flags& f) {
  RunConfig c;
  c.dataset = f.dataset;
  if (!f.matrix.empty()) c.matrix = f.matrix;
  if (!f.format.empty()) c.format = qaeval::parse_dataset_format(f.format);
  c.metrics = split_list(f.metrics);
  if (f.method == "all") {
    c.methods.assign(std::begin(qaeval::kAllCorrelationMethods),
                     std::end(qaeval::kAllCorrelationMethods));
  } else {
    c.methods.clear();
    for (const auto& m : split_list(f.method)) c.methods.push_back(qaeval::parse_correlation_method(m));
    if (c.methods.empty()) throw qaeval::ConfigError("--method is empty");
  }
  if (!f.routing.empty()) c.routing = f.routing;
  std::string endpoint = f.grader_endpoint;
  if (endpoint.empty()) {
    if (const char* env = std::getenv("QA_EVAL_GRADER_ENDPOINT")) endpoint = env;
  }
  if (!endpoint.empty()) c.grader_endpoint = endpoint;
  c.grader_id = f.grader_id;
  c.grader_timeout = std::chrono::milliseconds(f.grader_timeout_ms);
  c.grader_retries = f.grader_retries;
  c.seed = f.seed;
  c.bins = f.bins;
  c.min_support = f.min_support;
  c.out_dir = f.out;
  c.strict = f.strict;
  c.reclassify = f.reclassify;
  c.threads = f.threads;
  return c;
}

void add_common(CLI::App* cmd, Flags& f, bool dataset_required = true) {
  auto* opt = cmd->add_option("--dataset", f.dataset, "Dataset file (JSON-lines or CSV)");
  if (dataset_required) opt->required();
  cmd->add_option("--format", f.format, "json-lines | csv (default: by extension)")
      ->check(CLI::IsMember({"json-lines", "jsonl", "csv"}));
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed for random_baseline")->capture_default_str();
  cmd->add_option("--grader-endpoint", f.grader_endpoint,
                  "External grader URL (env: QA_EVAL_GRADER_ENDPOINT)");
  cmd->add_option("--grader-id", f.grader_id, "Metric id of the external grader")
      ->capture_default_str();
  cmd->add_option("--grader-timeout-ms", f.grader_timeout_ms)->capture_default_str();
  cmd->add_option("--grader-retries", f.grader_retries)->capture_default_str();
  cmd->add_flag("--strict", f.strict, "Exit nonzero on any grader failure");
  cmd->add_option("--threads", f.threads, "Worker threads for metric evaluation")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Question-answering evaluation: metrics, statistics, and metric routing"};
  app.set_version_flag("--version", QAEVAL_VERSION);
  app.require_subcommand(1);
  Flags f;

  auto* evaluate = app.add_subcommand("evaluate", "Score a dataset with every requested metric");
  add_common(evaluate, f);
  evaluate->add_option("--metrics", f.metrics, "Comma-separated metric ids (default: all)");

  auto* analyze = app.add_subcommand("analyze", "Correlations, mean deltas, per-type breakdowns");
  add_common(analyze, f, false);
  analyze->add_option("--matrix", f.matrix, "Score matrix CSV written by evaluate");
  analyze->add_option("--metrics", f.metrics, "Metrics to evaluate when no --matrix is given");
  analyze->add_option("--method", f.method, "pearson | spearman | kendall | all")
      ->capture_default_str();
  analyze->add_option("--bins", f.bins, "Histogram bins")->capture_default_str()->check(CLI::PositiveNumber);
  analyze->add_option("--min-support", f.min_support, "Low-support threshold per answer type")
      ->capture_default_str();
  analyze->add_flag("--reclassify", f.reclassify, "Ignore given answer_type labels");

  auto* classify = app.add_subcommand("classify", "Assign answer types and report label agreement");
  add_common(classify, f);
  classify->add_option("--routing", f.routing, "Routing config (for classifier thresholds)");

  auto* route = app.add_subcommand("route", "Score each record with its routed metric");
  add_common(route, f, false);
  route->add_option("--routing", f.routing, "Routing config JSON (default: built-in table)");
  route->add_flag("--reclassify", f.reclassify, "Ignore given answer_type labels");
  route->add_flag("--dump-routing", f.dump_routing, "Print the effective routing table and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig config = to_config(f);
    qaeval::cli::CommandResult result;
    if (evaluate->parsed()) {
      result = qaeval::cli::cmd_evaluate(config);
    } else if (analyze->parsed()) {
      result = qaeval::cli::cmd_analyze(config);
    } else if (classify->parsed()) {
      result = qaeval::cli::cmd_classify(config, std::cout);
    } else if (route->parsed()) {
      if (f.dump_routing) {
        const auto registry = qaeval::cli::detail::make_registry(config);
        std::cout << qaeval::routing_table_to_json(
                         qaeval::cli::effective_routing_table(config, registry))
                         .dump(2)
                  << "\n";
        return qaeval::cli::kExitOk;
      }
      result = qaeval::cli::cmd_route(config);
    }
    for (const auto& w : result.warnings) std::cerr << "qa-eval: warning: " << w << "\n";
    for (const auto& p : result.outputs) std::cerr << "wrote " << p.string() << "\n";
    return result.exit_code;
  } catch (const qaeval::ConfigError& e) {
    std::cerr << "qa-eval: error: " << e.what() << "\n";
    return qaeval::cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "qa-eval: error: " << e.what() << "\n";
    return qaeval::cli::kExitError;
  }
}
