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

// Dataset record model, JSON-lines / CSV ingestion and serialization, and
// dataset-level summaries.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qaeval/answer_type.hpp"
#include "qaeval/csv.hpp"
#include "qaeval/errors.hpp"
#include "qaeval/score.hpp"
#include "qaeval/utf8.hpp"

namespace qaeval {

// One (question, gold answers, attempt, human-like score, answer type)
// tuple. Empty optional text is represented as absent.
struct QARecord {
  std::string id;
  std::string question;
  std::vector<std::string> gold_answers;
  std::string attempt;
  std::optional<Score> human_score;
  std::optional<std::string> justification;
  std::optional<std::string> question_type;
  std::optional<AnswerType> answer_type;

  bool operator==(const QARecord&) const = default;
};

inline void validate_record_content(const QARecord& r) {
  if (utf8::trim(r.question).empty()) throw Error("question is empty");
  if (r.gold_answers.empty()) throw Error("gold answer list is empty");
  for (const auto& g : r.gold_answers) {
    if (utf8::trim(g).empty()) throw Error("gold answer is empty");
  }
}

inline void validate_record(const QARecord& r) {
  if (utf8::trim(r.id).empty()) throw Error("record id is empty");
  try {
    validate_record_content(r);
  } catch (const Error& e) {
    throw Error(std::string(e.what()) + " (record " + r.id + ")");
  }
}

// An ordered, validated collection of records with unique ids.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::vector<QARecord> records, std::string source)
      : records_(std::move(records)), source_(std::move(source)) {
    std::unordered_set<std::string> seen;
    for (const auto& r : records_) {
      validate_record(r);
      if (!seen.insert(r.id).second) {
        throw Error("duplicate record id: " + r.id);
      }
    }
  }

  const std::vector<QARecord>& records() const { return records_; }
  const std::string& source() const { return source_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const QARecord& operator[](std::size_t i) const { return records_[i]; }

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<QARecord> records_;
  std::string source_;
};

enum class DatasetFormat { kJsonLines, kCsv };

inline DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "json-lines" || name == "jsonl") return DatasetFormat::kJsonLines;
  if (name == "csv") return DatasetFormat::kCsv;
  throw ConfigError("unknown dataset format: " + std::string(name));
}

// Picks a format from a file extension; anything but .csv is JSON-lines.
inline DatasetFormat guess_dataset_format(std::string_view path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    return DatasetFormat::kCsv;
  }
  return DatasetFormat::kJsonLines;
}

inline constexpr std::string_view kGoldSeparator = "|||";

namespace detail {

inline std::optional<std::string> non_empty(std::string s) {
  if (s.empty()) return std::nullopt;
  return s;
}

inline Score parse_score_value(double v, std::size_t line) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    throw ParseError(line, "score out of range");
  }
  return Score(v);
}

inline AnswerType parse_type_label(std::string_view label, std::size_t line) {
  if (auto t = parse_answer_type(label)) return *t;
  throw ParseError(line, "unknown answer_type '" + std::string(label) + "'");
}

// Assigns "r<ordinal>" ids to records that came without one.
inline void finish_records(std::vector<QARecord>& records,
                           const std::vector<std::size_t>& lines) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].id.empty()) records[i].id = "r" + std::to_string(i + 1);
  }
  std::map<std::string, std::size_t> first_line;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = first_line.emplace(records[i].id, lines[i]);
    if (!inserted) {
      throw ParseError(lines[i], "duplicate id '" + records[i].id +
                                     "' (first seen at line " +
                                     std::to_string(it->second) + ")");
    }
  }
}

inline void check_utf8_lines(std::string_view text) {
  std::size_t line = 1;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    if (!utf8::is_valid(text.substr(start, end - start))) {
      throw ParseError(line, "invalid UTF-8");
    }
    start = end + 1;
    ++line;
  }
}

inline std::string json_text(const nlohmann::json& v, std::string_view field,
                             std::size_t line) {
  if (!v.is_string()) {
    throw ParseError(line, "field '" + std::string(field) + "' must be a string");
  }
  return v.get<std::string>();
}

inline QARecord record_from_json(const nlohmann::json& obj, std::size_t line) {
  if (!obj.is_object()) throw ParseError(line, "expected a JSON object");
  QARecord r;
  auto field = [&](const char* name) -> const nlohmann::json* {
    auto it = obj.find(name);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
  };

  if (const auto* v = field("id")) {
    if (v->is_string()) {
      r.id = v->get<std::string>();
      if (r.id.empty()) throw ParseError(line, "field 'id' is empty");
    } else if (v->is_number_integer()) {
      r.id = v->dump();
    } else {
      throw ParseError(line, "field 'id' must be a string or integer");
    }
  }

  const auto* q = field("question");
  if (q == nullptr) throw ParseError(line, "missing field 'question'");
  r.question = json_text(*q, "question", line);

  const auto* g = field("gold");
  if (g == nullptr) throw ParseError(line, "missing field 'gold'");
  if (g->is_string()) {
    r.gold_answers.push_back(g->get<std::string>());
  } else if (g->is_array()) {
    for (const auto& e : *g) r.gold_answers.push_back(json_text(e, "gold", line));
  } else {
    throw ParseError(line, "field 'gold' must be a string or an array of strings");
  }

  const auto* a = field("attempt");
  if (a == nullptr) throw ParseError(line, "missing field 'attempt'");
  r.attempt = json_text(*a, "attempt", line);

  if (const auto* s = field("human_score")) {
    if (!s->is_number()) throw ParseError(line, "field 'human_score' must be a number");
    r.human_score = parse_score_value(s->get<double>(), line);
  }
  if (const auto* j = field("justification")) {
    r.justification = non_empty(json_text(*j, "justification", line));
  }
  if (const auto* t = field("question_type")) {
    r.question_type = non_empty(json_text(*t, "question_type", line));
  }
  if (const auto* t = field("answer_type")) {
    r.answer_type = parse_type_label(json_text(*t, "answer_type", line), line);
  }
  return r;
}

}  // namespace detail

// Parses a whole JSON-lines or CSV document into a validated Dataset.
// Blank lines are ignored. Errors carry the 1-based line number.
inline Dataset parse_records(std::string_view text, DatasetFormat format,
                             std::string source = "stream") {
  detail::check_utf8_lines(text);
  std::vector<QARecord> records;
  std::vector<std::size_t> lines;

  auto checked = [](QARecord r, std::size_t line) {
    try {
      validate_record_content(r);
    } catch (const Error& e) {
      throw ParseError(line, e.what());
    }
    return r;
  };

  if (format == DatasetFormat::kJsonLines) {
    std::size_t line = 0;
    std::size_t start = 0;
    while (start < text.size()) {
      ++line;
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view raw = text.substr(start, end - start);
      start = end + 1;
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
      if (utf8::trim(raw).empty()) continue;

      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(raw);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(line, std::string("malformed JSON (") + e.what() + ")");
      }
      records.push_back(checked(detail::record_from_json(obj, line), line));
      lines.push_back(line);
    }
  } else {
    const auto rows = csv::parse(text);
    if (!rows.empty()) {
      const auto& header = rows.front().fields;
      std::map<std::string, std::size_t> col;
      for (std::size_t i = 0; i < header.size(); ++i) {
        std::string name(utf8::trim(header[i]));
        if (!col.emplace(name, i).second) {
          throw ParseError(rows.front().line, "duplicate column '" + name + "'");
        }
      }
      for (const char* required : {"question", "gold", "attempt"}) {
        if (!col.count(required)) {
          throw ParseError(rows.front().line,
                           std::string("missing column '") + required + "'");
        }
      }

      for (std::size_t ri = 1; ri < rows.size(); ++ri) {
        const auto& row = rows[ri];
        if (row.fields.size() != header.size()) {
          throw ParseError(row.line, "expected " + std::to_string(header.size()) +
                                         " fields, found " +
                                         std::to_string(row.fields.size()));
        }
        auto cell = [&](const char* name) -> std::optional<std::string> {
          auto it = col.find(name);
          if (it == col.end()) return std::nullopt;
          return row.fields[it->second];
        };

        QARecord r;
        if (auto v = cell("id")) r.id = *v;
        r.question = cell("question").value();
        const std::string gold = cell("gold").value();
        std::size_t pos = 0;
        while (true) {
          std::size_t next = gold.find(kGoldSeparator, pos);
          r.gold_answers.push_back(gold.substr(pos, next - pos));
          if (next == std::string::npos) break;
          pos = next + kGoldSeparator.size();
        }
        r.attempt = cell("attempt").value();
        if (auto v = cell("human_score"); v && !utf8::trim(*v).empty()) {
          std::string_view s = utf8::trim(*v);
          double value = 0.0;
          auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
          if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw ParseError(row.line, "human_score is not a number: '" +
                                           std::string(s) + "'");
          }
          r.human_score = detail::parse_score_value(value, row.line);
        }
        if (auto v = cell("justification")) r.justification = detail::non_empty(*v);
        if (auto v = cell("question_type")) r.question_type = detail::non_empty(*v);
        if (auto v = cell("answer_type"); v && !v->empty()) {
          r.answer_type = detail::parse_type_label(*v, row.line);
        }
        records.push_back(checked(std::move(r), row.line));
        lines.push_back(row.line);
      }
    }
  }

  detail::finish_records(records, lines);
  return Dataset(std::move(records), std::move(source));
}

inline Dataset parse_records(std::istream& in, DatasetFormat format,
                             std::string source = "stream") {
  std::string text{std::istreambuf_iterator<char>(in),
                   std::istreambuf_iterator<char>()};
  return parse_records(std::string_view(text), format, std::move(source));
}

inline nlohmann::ordered_json to_json(const QARecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["question"] = r.question;
  if (r.gold_answers.size() == 1) {
    j["gold"] = r.gold_answers.front();
  } else {
    j["gold"] = r.gold_answers;
  }
  j["attempt"] = r.attempt;
  if (r.human_score) j["human_score"] = r.human_score->value();
  if (r.justification) j["justification"] = *r.justification;
  if (r.question_type) j["question_type"] = *r.question_type;
  if (r.answer_type) j["answer_type"] = std::string(to_string(*r.answer_type));
  return j;
}

inline std::string serialize_jsonl(const Dataset& d) {
  std::string out;
  for (const auto& r : d.records()) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

// Shortest text that parses back to exactly `v`.
inline std::string format_roundtrip(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Gold answers containing "|||" cannot be represented in CSV.
inline std::string serialize_csv(const Dataset& d) {
  std::ostringstream os;
  csv::write_row(os, {"id", "question", "gold", "attempt", "human_score",
                      "justification", "question_type", "answer_type"});
  for (const auto& r : d.records()) {
    std::string gold;
    for (std::size_t i = 0; i < r.gold_answers.size(); ++i) {
      if (i > 0) gold += kGoldSeparator;
      gold += r.gold_answers[i];
    }
    csv::write_row(os, {r.id, r.question, gold, r.attempt,
                        r.human_score ? format_roundtrip(r.human_score->value()) : "",
                        r.justification.value_or(""), r.question_type.value_or(""),
                        r.answer_type ? std::string(to_string(*r.answer_type)) : ""});
  }
  return os.str();
}

// Dataset-level statistics. Score mean/std are absent when no record
// carries a human score. std is the population standard deviation.
struct DatasetSummary {
  std::size_t record_count = 0;
  std::size_t scored_count = 0;
  std::optional<double> score_mean;
  std::optional<double> score_std;
  std::map<std::string, std::size_t> unique_counts;
  std::map<AnswerType, std::size_t> per_type_counts;
};

inline constexpr std::string_view kSummaryFields[] = {
    "question", "gold", "attempt", "justification", "question_type", "answer_type"};

inline DatasetSummary summarize(const Dataset& d) {
  DatasetSummary s;
  s.record_count = d.size();

  std::map<std::string_view, std::set<std::string>> uniques;
  for (auto f : kSummaryFields) uniques[f];
  std::vector<double> scores;
  for (const auto& r : d.records()) {
    uniques["question"].emplace(utf8::trim(r.question));
    std::string gold;
    for (std::size_t i = 0; i < r.gold_answers.size(); ++i) {
      if (i > 0) gold += kGoldSeparator;
      gold += utf8::trim(r.gold_answers[i]);
    }
    uniques["gold"].insert(std::move(gold));
    uniques["attempt"].emplace(utf8::trim(r.attempt));
    if (r.justification) uniques["justification"].emplace(utf8::trim(*r.justification));
    if (r.question_type) uniques["question_type"].emplace(utf8::trim(*r.question_type));
    if (r.answer_type) {
      uniques["answer_type"].emplace(to_string(*r.answer_type));
      ++s.per_type_counts[*r.answer_type];
    }
    if (r.human_score) scores.push_back(r.human_score->value());
  }
  for (const auto& [field, values] : uniques) {
    s.unique_counts[std::string(field)] = values.size();
  }

  // Summing in sorted order makes the result independent of record order.
  std::sort(scores.begin(), scores.end());
  s.scored_count = scores.size();
  if (!scores.empty()) {
    const double n = static_cast<double>(scores.size());
    double sum = 0.0;
    for (double v : scores) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : scores) ss += (v - mean) * (v - mean);
    s.score_mean = mean;
    s.score_std = std::sqrt(ss / n);
  }
  return s;
}

}  // namespace qaeval
