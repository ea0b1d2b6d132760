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

#pragma once

// The evaluate / analyze / classify / route pipeline stages behind the
// qa-eval tool. Each stage reads files, writes its outputs into
// RunConfig::out_dir and returns a CommandResult; errors are thrown.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "qaeval/answer_type.hpp"
#include "qaeval/errors.hpp"
#include "qaeval/external_grader.hpp"
#include "qaeval/metrics.hpp"
#include "qaeval/mog.hpp"
#include "qaeval/qa_data.hpp"
#include "qaeval/report.hpp"
#include "qaeval/stats.hpp"

#ifndef QAEVAL_VERSION
#define QAEVAL_VERSION "0.0.0"
#endif

namespace qaeval::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitStrictFailure = 3;

struct RunConfig {
  std::string dataset;
  std::optional<std::string> matrix;
  std::optional<DatasetFormat> format;
  std::vector<std::string> metrics;  // empty: every registered metric
  std::vector<CorrelationMethod> methods{CorrelationMethod::kPearson};
  std::optional<std::string> routing;
  std::optional<std::string> grader_endpoint;
  std::string grader_id = "external_grader";
  std::chrono::milliseconds grader_timeout{30000};
  int grader_retries = 2;
  std::uint64_t seed = 0;
  std::size_t bins = 10;
  std::size_t min_support = 3;
  std::filesystem::path out_dir = ".";
  bool strict = false;
  bool reclassify = false;
  std::size_t threads = 1;
};

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> outputs;
  nlohmann::ordered_json report;
};

namespace detail {

inline nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["dataset"] = c.dataset;
  j["matrix"] = c.matrix ? nlohmann::ordered_json(*c.matrix) : nullptr;
  j["format"] = c.format ? nlohmann::ordered_json(*c.format == DatasetFormat::kCsv ? "csv" : "json-lines")
                         : nullptr;
  j["metrics"] = c.metrics;
  j["methods"] = nlohmann::ordered_json::array();
  for (auto m : c.methods) j["methods"].push_back(std::string(to_string(m)));
  j["routing"] = c.routing ? nlohmann::ordered_json(*c.routing) : nullptr;
  j["grader_endpoint"] = c.grader_endpoint ? nlohmann::ordered_json(*c.grader_endpoint) : nullptr;
  j["grader_id"] = c.grader_id;
  j["grader_timeout_ms"] = c.grader_timeout.count();
  j["grader_retries"] = c.grader_retries;
  j["seed"] = c.seed;
  j["bins"] = c.bins;
  j["min_support"] = c.min_support;
  j["strict"] = c.strict;
  j["reclassify"] = c.reclassify;
  return j;
}

inline nlohmann::ordered_json report_header(const std::string& command, const RunConfig& c) {
  nlohmann::ordered_json j;
  j["tool"] = "qa-eval";
  j["version"] = QAEVAL_VERSION;
  j["command"] = command;
  const auto cfg = config_json(c);
  j["config_hash"] = report::hex64(qaeval::detail::fnv1a(cfg.dump()));
  j["config"] = cfg;
  return j;
}

inline Dataset load_dataset(const RunConfig& c) {
  if (c.dataset.empty()) throw ConfigError("--dataset is required");
  const std::string text = report::read_file(c.dataset, "dataset");
  const DatasetFormat fmt = c.format.value_or(guess_dataset_format(c.dataset));
  return parse_records(std::string_view(text), fmt, c.dataset);
}

inline MetricRegistry make_registry(const RunConfig& c) {
  auto registry = MetricRegistry::with_builtins();
  if (c.grader_endpoint) {
    ExternalGraderConfig g;
    g.endpoint = *c.grader_endpoint;
    g.timeout = c.grader_timeout;
    g.max_retries = c.grader_retries;
    g.id = MetricId(c.grader_id);
    register_external_grader(registry, g);
  }
  return registry;
}

inline std::vector<MetricId> requested_metrics(const RunConfig& c, const MetricRegistry& r) {
  std::vector<MetricId> ids;
  if (c.metrics.empty()) return r.ids();
  for (const auto& name : c.metrics) {
    MetricId id(name);
    r.at(id);
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  }
  return ids;
}

inline MetricContext make_context(const RunConfig& c) {
  MetricContext ctx;
  ctx.random_seed = c.seed;
  return ctx;
}

inline std::filesystem::path emit(CommandResult& result, const RunConfig& c,
                                  const std::string& name, const std::string& content) {
  const auto path = c.out_dir / name;
  report::write_file(path, content);
  result.outputs.push_back(path);
  return path;
}

inline void finish(CommandResult& result, const RunConfig& c, const std::string& report_name) {
  emit(result, c, report_name, result.report.dump(2) + "\n");
  if (!result.warnings.empty() && c.strict) result.exit_code = kExitStrictFailure;
}

inline nlohmann::ordered_json cell_errors_json(const ScoreMatrix& m) {
  auto j = nlohmann::ordered_json::array();
  for (const auto& e : m.errors) {
    j.push_back({{"id", m.record_ids[e.row]}, {"metric", e.metric.str()}, {"message", e.message}});
  }
  return j;
}

// Types aligned with the matrix rows, matched by record id.
inline std::vector<AnswerType> types_for_matrix(const ScoreMatrix& m, const Dataset& d,
                                                const RunConfig& c) {
  const auto all = resolve_answer_types(d, {}, c.reclassify);
  std::unordered_map<std::string, AnswerType> by_id;
  for (std::size_t i = 0; i < d.size(); ++i) by_id.emplace(d[i].id, all[i]);
  std::vector<AnswerType> out;
  for (const auto& id : m.record_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw AnalysisError("matrix record '" + id + "' is not in the dataset");
    out.push_back(it->second);
  }
  return out;
}

inline nlohmann::ordered_json breakdown_json(const TypedBreakdown& b) {
  auto group = [](const GroupStats& g) {
    nlohmann::ordered_json j;
    j["records"] = g.record_count;
    j["scored"] = g.scored_count;
    j["low_support"] = g.low_support;
    j["metrics"] = nlohmann::ordered_json::object();
    for (const auto& s : g.metrics) {
      nlohmann::ordered_json m;
      m["n"] = s.n;
      m["mean_delta"] = report::json_number(s.mean_delta);
      for (const auto& [method, v] : s.correlation) m[std::string(to_string(method))] = report::json_number(v);
      j["metrics"][s.metric.str()] = std::move(m);
    }
    return j;
  };
  nlohmann::ordered_json j;
  j["all"] = group(b.global);
  for (const auto& [type, g] : b.per_type) j[std::string(to_string(type))] = group(g);
  return j;
}

}  // namespace detail

// Scores every record with the requested metrics and writes scores.csv
// plus evaluate_report.json.
inline CommandResult cmd_evaluate(const RunConfig& c) {
  const Dataset d = detail::load_dataset(c);
  const auto registry = detail::make_registry(c);
  const auto metrics = detail::requested_metrics(c, registry);
  const ScoreMatrix m =
      evaluate_all(d, metrics, detail::make_context(c), registry, EvaluateOptions{c.threads});

  CommandResult result;
  detail::emit(result, c, "scores.csv", report::score_matrix_csv(m));
  for (const auto& e : m.errors) {
    result.warnings.push_back("record " + m.record_ids[e.row] + ", metric " + e.metric.str() +
                              ": " + e.message);
  }

  auto& r = result.report = detail::report_header("evaluate", c);
  r["dataset"] = {{"source", d.source()}, {"summary", report::summary_json(summarize(d))}};
  r["score_matrix"] = "scores.csv";
  r["metrics"] = nlohmann::ordered_json::array();
  for (const auto& id : metrics) r["metrics"].push_back(id.str());
  r["scored_records"] = m.rows();
  r["skipped"] = nlohmann::ordered_json::array();
  r["errors"] = detail::cell_errors_json(m);
  detail::finish(result, c, "evaluate_report.json");
  return result;
}

// Correlation matrices, mean deltas, per-type breakdowns and histograms.
// Reads --matrix when given (with --dataset supplying answer types), else
// evaluates --dataset first.
inline CommandResult cmd_analyze(const RunConfig& c) {
  std::optional<Dataset> d;
  if (!c.dataset.empty()) d = detail::load_dataset(c);
  if (!c.matrix && !d) throw ConfigError("analyze needs --matrix or --dataset");

  ScoreMatrix m;
  if (c.matrix) {
    m = report::parse_score_matrix_csv(report::read_file(*c.matrix, "score matrix"));
  } else {
    const auto registry = detail::make_registry(c);
    m = evaluate_all(*d, detail::requested_metrics(c, registry), detail::make_context(c), registry,
                     EvaluateOptions{c.threads});
  }
  if (!m.has_human()) {
    throw AnalysisError("analysis requires a human score column (human_score)");
  }

  std::vector<AnswerType> types;
  if (d) types = detail::types_for_matrix(m, *d, c);

  CommandResult result;
  auto& r = result.report = detail::report_header("analyze", c);
  r["correlations"] = nlohmann::ordered_json::object();
  for (auto method : c.methods) {
    const auto cm = correlation_matrix(m, method);
    detail::emit(result, c, "correlation_" + std::string(to_string(method)) + ".csv",
                 report::correlation_csv(cm));
    r["correlations"][std::string(to_string(method))] = report::correlation_json(cm);
  }

  BreakdownOptions opts;
  opts.methods = c.methods;
  opts.bins = c.bins;
  opts.min_support = c.min_support;
  TypedBreakdown b;
  if (d) {
    b = per_type_analysis(m, types, opts);
  } else {
    std::vector<std::size_t> all(m.rows());
    std::iota(all.begin(), all.end(), 0);
    b.global = analyze_group(m, all, opts);
  }
  detail::emit(result, c, "mean_delta.csv", report::mean_delta_csv(b));
  for (auto method : c.methods) {
    detail::emit(result, c, "per_type_" + std::string(to_string(method)) + ".csv",
                 report::breakdown_csv(b, method));
  }
  detail::emit(result, c, "histograms.csv", report::histogram_csv(b));

  r["per_type_available"] = d.has_value();
  r["breakdown"] = detail::breakdown_json(b);
  std::size_t scored = 0;
  auto skipped = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if ((*m.human)[i]) {
      ++scored;
    } else {
      skipped.push_back({{"id", m.record_ids[i]}, {"reason", "no human_score"}});
    }
  }
  r["scored_records"] = scored;
  r["skipped"] = std::move(skipped);
  r["errors"] = detail::cell_errors_json(m);
  if (!m.errors.empty()) {
    result.warnings.push_back(std::to_string(m.errors.size()) + " failed cells in the score matrix");
  }
  detail::finish(result, c, "analyze_report.json");
  return result;
}

struct AgreementReport {
  std::size_t labeled = 0;
  std::size_t agreed = 0;
  std::map<std::pair<AnswerType, AnswerType>, std::size_t> matrix;  // (given, classified)

  double rate() const {
    return labeled == 0 ? 0.0 : static_cast<double>(agreed) / static_cast<double>(labeled);
  }
};

// Writes classification.csv and, when the dataset carries labels,
// agreement.csv; the agreement matrix and rate are also printed to `out`.
inline CommandResult cmd_classify(const RunConfig& c, std::ostream& out) {
  const Dataset d = detail::load_dataset(c);
  RoutingTable table = default_routing_table();
  if (c.routing) {
    table = load_routing_table(report::read_file(*c.routing, "routing config"),
                               detail::make_registry(c));
  }
  const AnswerTypeClassifier classifier(table.classifier);

  std::vector<std::vector<std::string>> rows{{"id", "given_type", "classified_type", "fired_rule"}};
  AgreementReport agreement;
  std::map<AnswerType, std::size_t> classified_counts;
  for (const auto& rec : d.records()) {
    const auto cls = classify_record(rec, classifier);
    ++classified_counts[cls.type];
    rows.push_back({rec.id, rec.answer_type ? std::string(to_string(*rec.answer_type)) : "",
                    std::string(to_string(cls.type)), cls.rule});
    if (rec.answer_type) {
      ++agreement.labeled;
      if (*rec.answer_type == cls.type) ++agreement.agreed;
      ++agreement.matrix[{*rec.answer_type, cls.type}];
    }
  }

  CommandResult result;
  detail::emit(result, c, "classification.csv", report::csv_text(rows));
  auto& r = result.report = detail::report_header("classify", c);
  r["records"] = d.size();
  r["classified_counts"] = nlohmann::ordered_json::object();
  for (AnswerType t : kAllAnswerTypes) {
    if (auto it = classified_counts.find(t); it != classified_counts.end()) {
      r["classified_counts"][std::string(to_string(t))] = it->second;
    }
  }

  if (agreement.labeled > 0) {
    std::set<AnswerType> seen;
    for (const auto& [k, _] : agreement.matrix) {
      seen.insert(k.first);
      seen.insert(k.second);
    }
    std::vector<std::vector<std::string>> arows;
    std::vector<std::string> header{"given\\classified"};
    for (AnswerType t : seen) header.emplace_back(to_string(t));
    arows.push_back(header);
    for (AnswerType g : seen) {
      std::vector<std::string> row{std::string(to_string(g))};
      for (AnswerType k : seen) {
        auto it = agreement.matrix.find({g, k});
        row.push_back(std::to_string(it == agreement.matrix.end() ? 0 : it->second));
      }
      arows.push_back(std::move(row));
    }
    const std::string table_text = report::csv_text(arows);
    detail::emit(result, c, "agreement.csv", table_text);
    out << "agreement matrix (rows: given, columns: classified)\n" << table_text;
    out << "agreement: " << report::fixed6(agreement.rate()) << " (" << agreement.agreed << "/"
        << agreement.labeled << ")\n";
    r["agreement"] = {{"labeled", agreement.labeled},
                      {"agreed", agreement.agreed},
                      {"rate", report::round6(agreement.rate())}};
  } else {
    r["agreement"] = nullptr;
  }
  r["skipped"] = nlohmann::ordered_json::array();
  detail::finish(result, c, "classify_report.json");
  return result;
}

inline RoutingTable effective_routing_table(const RunConfig& c, const MetricRegistry& registry) {
  if (c.routing) {
    return load_routing_table(report::read_file(*c.routing, "routing config"), registry);
  }
  std::optional<MetricId> grader;
  if (c.grader_endpoint) grader = MetricId(c.grader_id);
  return default_routing_table(grader);
}

// Scores each record with its routed metric. Writes routed.csv and
// route_report.json.
inline CommandResult cmd_route(const RunConfig& c) {
  const Dataset d = detail::load_dataset(c);
  if (d.empty()) throw AnalysisError("cannot route an empty dataset");
  const auto registry = detail::make_registry(c);
  const RoutingTable table = effective_routing_table(c, registry);

  MetricContext ctx = detail::make_context(c);
  if (routes_to(table, metric_ids::kTfIdfCosine)) {
    ctx.tfidf_model = std::make_shared<const TfIdfModel>(fit_tfidf_for_dataset(d, ctx.normalization));
  }

  MogOptions opts;
  opts.force_reclassify = c.reclassify;
  std::vector<RoutedScore> routed;
  routed.reserve(d.size());
  for (const auto& rec : d.records()) routed.push_back(mog_score(rec, table, registry, ctx, opts));

  CommandResult result;
  std::vector<std::vector<std::string>> rows{
      {"id", "answer_type", "fired_rule", "metric_used", "score", "fallback_used"}};
  std::map<AnswerType, std::size_t> per_type;
  std::map<std::string, std::size_t> per_metric;
  std::size_t fallbacks = 0;
  auto failures = nlohmann::ordered_json::array();
  std::vector<double> mog_scores, human_scores;
  std::map<AnswerType, std::pair<std::vector<double>, std::vector<double>>> typed_pairs;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& rs = routed[i];
    rows.push_back({d[i].id, std::string(to_string(rs.answer_type)), rs.fired_rule,
                    rs.metric_used.str(), report::fixed6(rs.score.value()),
                    rs.fallback_used ? "true" : "false"});
    ++per_type[rs.answer_type];
    ++per_metric[rs.metric_used.str()];
    if (rs.fallback_used) {
      ++fallbacks;
      failures.push_back({{"id", d[i].id},
                          {"routed_metric", table.route(rs.answer_type).str()},
                          {"message", rs.failure.value_or("")}});
      result.warnings.push_back("record " + d[i].id + " fell back to " + rs.metric_used.str() +
                                ": " + rs.failure.value_or(""));
    }
    if (d[i].human_score) {
      mog_scores.push_back(rs.score.value());
      human_scores.push_back(d[i].human_score->value());
      typed_pairs[rs.answer_type].first.push_back(rs.score.value());
      typed_pairs[rs.answer_type].second.push_back(d[i].human_score->value());
    }
  }
  detail::emit(result, c, "routed.csv", report::csv_text(rows));

  auto& r = result.report = detail::report_header("route", c);
  r["dataset"] = {{"source", d.source()}, {"summary", report::summary_json(summarize(d))}};
  r["routing"] = routing_table_to_json(table);
  r["routed_scores"] = "routed.csv";
  nlohmann::ordered_json mog;
  mog["per_type"] = nlohmann::ordered_json::object();
  for (AnswerType t : kAllAnswerTypes) {
    if (auto it = per_type.find(t); it != per_type.end()) mog["per_type"][std::string(to_string(t))] = it->second;
  }
  mog["per_metric"] = per_metric;
  mog["fallback_count"] = fallbacks;
  mog["fallback_rate"] = report::round6(static_cast<double>(fallbacks) / static_cast<double>(d.size()));
  r["mog"] = std::move(mog);
  if (!mog_scores.empty()) {
    nlohmann::ordered_json delta;
    delta["all"] = report::round6(mean_score_delta(mog_scores, human_scores));
    for (const auto& [t, p] : typed_pairs) {
      delta[std::string(to_string(t))] = report::round6(mean_score_delta(p.first, p.second));
    }
    r["mean_delta_vs_human"] = std::move(delta);
  } else {
    r["mean_delta_vs_human"] = nullptr;
  }
  r["scored_records"] = d.size();
  r["skipped"] = nlohmann::ordered_json::array();
  r["errors"] = std::move(failures);
  detail::finish(result, c, "route_report.json");
  return result;
}

}  // namespace qaeval::cli
