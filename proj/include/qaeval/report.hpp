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

// Report emitters: fixed-precision CSV tables and JSON run reports. All
// numbers are written with six decimals so reruns are byte-identical.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qaeval/csv.hpp"
#include "qaeval/errors.hpp"
#include "qaeval/metrics.hpp"
#include "qaeval/qa_data.hpp"
#include "qaeval/stats.hpp"

namespace qaeval::report {

inline constexpr std::string_view kUndefined = "undefined";
inline constexpr std::string_view kFailed = "failed";
inline constexpr std::string_view kMissing = "NA";

inline std::string fixed6(double v) {
  if (v == 0.0) v = 0.0;  // no "-0.000000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

inline std::string fixed6(const std::optional<double>& v) {
  return v ? fixed6(*v) : std::string(kUndefined);
}

// Rounded to six decimals for JSON output.
inline double round6(double v) {
  const double r = std::round(v * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

inline nlohmann::ordered_json json_number(const std::optional<double>& v) {
  if (!v) return nullptr;
  return round6(*v);
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string read_file(const std::filesystem::path& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + std::string(what) + ": " + path.string());
  return std::string{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("failed writing " + path.string());
}

inline std::string csv_text(const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) csv::write_row(os, r);
  return os.str();
}

// id, <metric...>, human. Failed cells are "failed", missing human scores "NA".
inline std::string score_matrix_csv(const ScoreMatrix& m) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"id"};
  for (const auto& id : m.metric_ids) header.push_back(id.str());
  header.emplace_back(kHumanLabel);
  rows.push_back(std::move(header));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::vector<std::string> row{m.record_ids[r]};
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const auto& cell = m.at(r, c);
      row.push_back(cell ? fixed6(cell->value()) : std::string(kFailed));
    }
    const std::optional<Score> h = m.human ? (*m.human)[r] : std::nullopt;
    row.push_back(h ? fixed6(h->value()) : std::string(kMissing));
    rows.push_back(std::move(row));
  }
  return csv_text(rows);
}

// Inverse of score_matrix_csv. The trailing "human" column is optional.
inline ScoreMatrix parse_score_matrix_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty()) throw ParseError(0, "score matrix is empty");
  const auto& header = rows.front().fields;
  if (header.empty() || header.front() != "id") {
    throw ParseError(rows.front().line, "score matrix must start with an 'id' column");
  }
  const bool has_human = header.size() >= 2 && header.back() == kHumanLabel;
  const std::size_t metric_end = has_human ? header.size() - 1 : header.size();

  ScoreMatrix m;
  for (std::size_t c = 1; c < metric_end; ++c) m.metric_ids.emplace_back(header[c]);
  if (has_human) m.human.emplace();

  auto parse_cell = [](const std::string& s, std::size_t line) -> std::optional<Score> {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ParseError(line, "not a score: '" + s + "'");
    }
    if (!(v >= 0.0 && v <= 1.0)) throw ParseError(line, "score out of range");
    return Score(v);
  };

  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.fields.size() != header.size()) {
      throw ParseError(row.line, "expected " + std::to_string(header.size()) + " fields");
    }
    m.record_ids.push_back(row.fields[0]);
    for (std::size_t c = 1; c < metric_end; ++c) {
      const auto& s = row.fields[c];
      if (s == kFailed) {
        m.cells.emplace_back(std::nullopt);
        m.errors.push_back({i - 1, m.metric_ids[c - 1], "failed in source matrix"});
      } else {
        m.cells.push_back(parse_cell(s, row.line));
      }
    }
    if (has_human) {
      const auto& s = row.fields.back();
      m.human->push_back(s == kMissing || s.empty() ? std::nullopt : parse_cell(s, row.line));
    }
  }
  return m;
}

inline std::string correlation_csv(const CorrelationMatrix& cm) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"label"};
  header.insert(header.end(), cm.labels.begin(), cm.labels.end());
  rows.push_back(std::move(header));
  for (std::size_t i = 0; i < cm.size(); ++i) {
    std::vector<std::string> row{cm.labels[i]};
    for (std::size_t j = 0; j < cm.size(); ++j) row.push_back(fixed6(cm.at(i, j)));
    rows.push_back(std::move(row));
  }
  return csv_text(rows);
}

inline nlohmann::ordered_json correlation_json(const CorrelationMatrix& cm) {
  nlohmann::ordered_json j;
  j["method"] = std::string(to_string(cm.method));
  j["records_used"] = cm.records_used;
  j["records_skipped"] = cm.records_skipped;
  j["labels"] = cm.labels;
  j["cells"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < cm.size(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t j2 = 0; j2 < cm.size(); ++j2) row.push_back(json_number(cm.at(i, j2)));
    j["cells"].push_back(std::move(row));
  }
  return j;
}

inline std::string group_name(const std::optional<AnswerType>& t) {
  return t ? std::string(to_string(*t)) : std::string("all");
}

// group, metric, n, mean_delta
inline std::string mean_delta_csv(const TypedBreakdown& b) {
  std::vector<std::vector<std::string>> rows{{"group", "metric", "n", "mean_delta"}};
  auto emit = [&](const std::string& group, const GroupStats& g) {
    for (const auto& s : g.metrics) {
      rows.push_back({group, s.metric.str(), std::to_string(s.n), fixed6(s.mean_delta)});
    }
  };
  emit("all", b.global);
  for (const auto& [type, g] : b.per_type) emit(group_name(type), g);
  return csv_text(rows);
}

// group, records, scored, low_support, metric, n, correlation, mean_delta
inline std::string breakdown_csv(const TypedBreakdown& b, CorrelationMethod method) {
  std::vector<std::vector<std::string>> rows{
      {"group", "records", "scored", "low_support", "metric", "n", "correlation", "mean_delta"}};
  auto emit = [&](const std::string& group, const GroupStats& g) {
    for (const auto& s : g.metrics) {
      auto it = s.correlation.find(method);
      rows.push_back({group, std::to_string(g.record_count), std::to_string(g.scored_count),
                      g.low_support ? "true" : "false", s.metric.str(), std::to_string(s.n),
                      fixed6(it == s.correlation.end() ? std::nullopt : it->second),
                      fixed6(s.mean_delta)});
    }
  };
  emit("all", b.global);
  for (const auto& [type, g] : b.per_type) emit(group_name(type), g);
  return csv_text(rows);
}

// group, series, bin, lo, hi, count
inline std::string histogram_csv(const TypedBreakdown& b) {
  std::vector<std::vector<std::string>> rows{{"group", "series", "bin", "lo", "hi", "count"}};
  auto emit_series = [&](const std::string& group, const std::string& series,
                         const std::vector<HistogramBin>& bins) {
    for (std::size_t i = 0; i < bins.size(); ++i) {
      rows.push_back({group, series, std::to_string(i), fixed6(bins[i].lo), fixed6(bins[i].hi),
                      std::to_string(bins[i].count)});
    }
  };
  auto emit = [&](const std::string& group, const GroupStats& g) {
    emit_series(group, std::string(kHumanLabel), g.human_histogram);
    for (const auto& s : g.metrics) emit_series(group, s.metric.str(), s.histogram);
  };
  emit("all", b.global);
  for (const auto& [type, g] : b.per_type) emit(group_name(type), g);
  return csv_text(rows);
}

inline nlohmann::ordered_json summary_json(const DatasetSummary& s) {
  nlohmann::ordered_json j;
  j["record_count"] = s.record_count;
  j["scored_count"] = s.scored_count;
  j["score_mean"] = json_number(s.score_mean);
  j["score_std"] = json_number(s.score_std);
  j["unique_counts"] = nlohmann::ordered_json::object();
  for (auto f : kSummaryFields) j["unique_counts"][std::string(f)] = s.unique_counts.at(std::string(f));
  j["per_type_counts"] = nlohmann::ordered_json::object();
  for (AnswerType t : kAllAnswerTypes) {
    if (auto it = s.per_type_counts.find(t); it != s.per_type_counts.end()) {
      j["per_type_counts"][std::string(to_string(t))] = it->second;
    }
  }
  return j;
}

}  // namespace qaeval::report
