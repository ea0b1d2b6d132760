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

// Mixture of graders: classify each (question, gold answer) pair into one
// of the sixteen answer types, then score the attempt with the metric the
// routing table assigns to that type.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qaeval/answer_type.hpp"
#include "qaeval/errors.hpp"
#include "qaeval/metrics.hpp"
#include "qaeval/qa_data.hpp"
#include "qaeval/text_norm.hpp"
#include "qaeval/utf8.hpp"

namespace qaeval {

// Every tunable number used by the default rule ladder.
struct ClassifierThresholds {
  double code_min_punct_density = 0.15;
  std::size_t formula_max_tokens = 10;
  std::size_t list_min_lines = 2;
  std::size_t list_min_items = 3;
  std::size_t list_max_item_tokens = 4;
  std::size_t name_max_tokens = 4;
  std::size_t phrase_min_tokens = 2;
  std::size_t phrase_max_tokens = 5;
  std::size_t sentence_max_tokens = 30;
  std::size_t short_paragraph_max_sentences = 3;
  std::size_t paragraph_max_sentences = 6;
  std::size_t long_paragraph_max_sentences = 12;

  bool operator==(const ClassifierThresholds&) const = default;
};

// Precomputed views of the gold answer that the rule predicates inspect.
struct ClassifierInput {
  std::string_view question;
  std::string gold;                 // trimmed raw text
  std::u32string chars;             // decoded `gold`
  std::vector<std::string> raw_tokens;
  std::vector<std::string> lines;   // non-blank lines
  std::size_t normalized_tokens = 0;
  std::string normalized;
  std::size_t sentences = 0;
};

namespace detail {

inline bool is_sentence_end(char32_t c) { return c == U'.' || c == U'!' || c == U'?'; }

// Splits on runs of . ! ? followed by whitespace or end of text, and counts
// the non-blank pieces.
inline std::size_t count_sentences(std::u32string_view s) {
  std::size_t count = 0;
  bool has_content = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (is_sentence_end(s[i])) {
      std::size_t j = i;
      while (j + 1 < s.size() && is_sentence_end(s[j + 1])) ++j;
      if (j + 1 == s.size() || utf8::is_whitespace(s[j + 1])) {
        if (has_content) ++count;
        has_content = false;
      }
      i = j;
      continue;
    }
    if (!utf8::is_whitespace(s[i])) has_content = true;
  }
  if (has_content) ++count;
  return count;
}

inline std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find('\n', start);
    if (end == std::string_view::npos) end = s.size();
    auto line = utf8::trim(s.substr(start, end - start));
    if (!line.empty()) lines.emplace_back(line);
    start = end + 1;
  }
  return lines;
}

inline bool ends_with_sentence_punct(std::u32string_view s) {
  return !s.empty() && is_sentence_end(s.back());
}

}  // namespace detail

inline ClassifierInput make_classifier_input(std::string_view question, std::string_view gold) {
  ClassifierInput in;
  in.question = question;
  in.gold = std::string(utf8::trim(gold));
  if (in.gold.empty()) throw Error("cannot classify an empty gold answer");
  in.chars = utf8::decode(in.gold);
  in.raw_tokens = tokenize(in.gold).tokens;
  in.lines = detail::split_lines(in.gold);
  in.normalized = normalize(in.gold);
  in.normalized_tokens = tokenize(in.normalized).size();
  in.sentences = detail::count_sentences(in.chars);
  return in;
}

namespace rules {

using Predicate = std::function<bool(const ClassifierInput&, const ClassifierThresholds&)>;

inline bool is_boolean(const ClassifierInput& in, const ClassifierThresholds&) {
  return in.normalized == "yes" || in.normalized == "no" || in.normalized == "true" ||
         in.normalized == "false";
}

inline bool is_single_character(const ClassifierInput& in, const ClassifierThresholds&) {
  return in.chars.size() == 1 && utf8::is_alnum(in.chars[0]);
}

inline bool is_symbol(const ClassifierInput& in, const ClassifierThresholds&) {
  return in.raw_tokens.size() == 1 &&
         std::none_of(in.chars.begin(), in.chars.end(), utf8::is_alnum);
}

inline bool is_numerical(const ClassifierInput& in, const ClassifierThresholds&) {
  static const std::regex re(
      R"(^[+-]?(?:(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?|\.\d+)(?:[eE][+-]?\d+)?%?$)");
  return std::regex_match(in.gold, re);
}

inline bool is_code_snippet(const ClassifierInput& in, const ClassifierThresholds& t) {
  if (in.gold.find("```") != std::string::npos) return true;
  std::size_t non_space = 0, code = 0;
  bool hard_marker = false;
  for (char32_t c : in.chars) {
    if (utf8::is_whitespace(c)) continue;
    ++non_space;
    if (std::u32string_view(U";{}()=<>[]").find(c) != std::u32string_view::npos) ++code;
    if (c == U';' || c == U'{' || c == U'}') hard_marker = true;
  }
  if (non_space == 0) return false;
  const double density = static_cast<double>(code) / static_cast<double>(non_space);
  return density >= t.code_min_punct_density && (in.lines.size() >= 2 || hard_marker);
}

inline bool is_equation(const ClassifierInput& in, const ClassifierThresholds&) {
  static const std::regex tex(R"(\$\$.+\$\$|\\\(.+\\\)|\\\[.+\\\]|\$[^$\s](?:[^$]*[^$\s])?\$)");
  if (std::regex_search(in.gold, tex)) return true;
  const std::size_t eq = in.gold.find('=');
  if (eq == std::string::npos) return false;
  std::string_view lhs = std::string_view(in.gold).substr(0, eq);
  std::string_view rhs = std::string_view(in.gold).substr(eq + 1);
  while (!lhs.empty() && std::string_view("<>!=").find(lhs.back()) != std::string_view::npos) {
    lhs.remove_suffix(1);
  }
  while (!rhs.empty() && std::string_view("<>=").find(rhs.front()) != std::string_view::npos) {
    rhs.remove_prefix(1);
  }
  return !utf8::trim(lhs).empty() && !utf8::trim(rhs).empty();
}

inline bool is_formula(const ClassifierInput& in, const ClassifierThresholds& t) {
  if (in.raw_tokens.size() > t.formula_max_tokens) return false;
  if (std::none_of(in.chars.begin(), in.chars.end(), utf8::is_alnum)) return false;
  static const std::u32string_view kOperators = U"+*/^×÷·√∑∏∫∂±−";
  for (std::size_t i = 0; i < in.chars.size(); ++i) {
    const char32_t c = in.chars[i];
    if (kOperators.find(c) != std::u32string_view::npos) return true;
    if ((c >= 0x2070 && c <= 0x2079) || (c >= 0x2080 && c <= 0x2089)) return true;
    // binary minus: "x - y" on one line, not a bullet
    if (c == U'-' && i >= 2 && i + 1 < in.chars.size() && in.chars[i - 1] == U' ' &&
        in.chars[i + 1] == U' ' &&
        (utf8::is_alnum(in.chars[i - 2]) || in.chars[i - 2] == U')')) {
      return true;
    }
  }
  // Chemical formulas such as H2O or Ca(OH)2.
  static const std::regex chem(R"(^(?:[A-Z][a-z]?\d*|\((?:[A-Z][a-z]?\d*)+\)\d*)+$)");
  return in.raw_tokens.size() == 1 && std::regex_match(in.gold, chem) &&
         std::any_of(in.gold.begin(), in.gold.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline bool is_list(const ClassifierInput& in, const ClassifierThresholds& t) {
  static const std::regex bullet(R"(^(?:[-*+]|•|·|‣|◦|\d+[.)])\s+\S.*$)");
  std::size_t marked = 0;
  for (const auto& line : in.lines) {
    if (std::regex_match(line, bullet)) ++marked;
  }
  if (marked >= t.list_min_lines) return true;

  if (detail::ends_with_sentence_punct(in.chars)) return false;
  std::vector<std::string_view> items;
  std::string_view rest = in.gold;
  while (true) {
    const std::size_t cut = rest.find_first_of(",;");
    items.push_back(utf8::trim(rest.substr(0, cut)));
    if (cut == std::string_view::npos) break;
    rest = rest.substr(cut + 1);
  }
  if (items.size() < t.list_min_items) return false;
  return std::all_of(items.begin(), items.end(), [&](std::string_view item) {
    const std::size_t n = tokenize(item).size();
    return n >= 1 && n <= t.list_max_item_tokens;
  });
}

inline bool is_name(const ClassifierInput& in, const ClassifierThresholds& t) {
  if (in.raw_tokens.empty() || in.raw_tokens.size() > t.name_max_tokens) return false;
  if (detail::ends_with_sentence_punct(in.chars)) return false;
  return std::all_of(in.raw_tokens.begin(), in.raw_tokens.end(), [](const std::string& tok) {
    const auto chars = utf8::decode(tok);
    return !chars.empty() && utf8::is_upper(chars.front());
  });
}

inline bool is_single_word(const ClassifierInput& in, const ClassifierThresholds&) {
  return in.normalized_tokens == 1;
}

inline bool is_phrase(const ClassifierInput& in, const ClassifierThresholds& t) {
  return in.raw_tokens.size() >= t.phrase_min_tokens &&
         in.raw_tokens.size() <= t.phrase_max_tokens &&
         !detail::ends_with_sentence_punct(in.chars);
}

inline bool is_sentence(const ClassifierInput& in, const ClassifierThresholds& t) {
  return in.sentences == 1 && in.raw_tokens.size() <= t.sentence_max_tokens;
}

inline bool is_short_paragraph(const ClassifierInput& in, const ClassifierThresholds& t) {
  return in.sentences >= 2 && in.sentences <= t.short_paragraph_max_sentences;
}

inline bool is_paragraph(const ClassifierInput& in, const ClassifierThresholds& t) {
  return in.sentences > t.short_paragraph_max_sentences &&
         in.sentences <= t.paragraph_max_sentences;
}

inline bool is_long_paragraph(const ClassifierInput& in, const ClassifierThresholds& t) {
  return in.sentences > t.paragraph_max_sentences &&
         in.sentences <= t.long_paragraph_max_sentences;
}

inline bool is_essay(const ClassifierInput& in, const ClassifierThresholds& t) {
  return in.sentences > t.long_paragraph_max_sentences;
}

inline bool always(const ClassifierInput&, const ClassifierThresholds&) { return true; }

}  // namespace rules

struct ClassifierRule {
  int priority = 0;  // lower fires first
  std::string id;
  AnswerType emits = AnswerType::kParagraph;
  rules::Predicate predicate;
};

inline std::vector<ClassifierRule> default_classifier_rules() {
  using AT = AnswerType;
  return {
      {1, "boolean", AT::kBoolean, rules::is_boolean},
      {2, "single_character", AT::kSingleCharacter, rules::is_single_character},
      {3, "symbol", AT::kSymbol, rules::is_symbol},
      {4, "numerical", AT::kNumerical, rules::is_numerical},
      {5, "code_snippet", AT::kCodeSnippet, rules::is_code_snippet},
      {6, "equation", AT::kEquation, rules::is_equation},
      {7, "formula", AT::kFormula, rules::is_formula},
      {8, "list", AT::kList, rules::is_list},
      {9, "name", AT::kName, rules::is_name},
      {10, "single_word", AT::kSingleWord, rules::is_single_word},
      {11, "phrase", AT::kPhrase, rules::is_phrase},
      {12, "sentence", AT::kSentence, rules::is_sentence},
      {13, "short_paragraph", AT::kShortParagraph, rules::is_short_paragraph},
      {14, "paragraph", AT::kParagraph, rules::is_paragraph},
      {15, "long_paragraph", AT::kLongParagraph, rules::is_long_paragraph},
      {16, "essay", AT::kEssay, rules::is_essay},
      {17, "residue_paragraph", AT::kParagraph, rules::always},
  };
}

struct Classification {
  AnswerType type = AnswerType::kParagraph;
  std::string rule;

  bool operator==(const Classification&) const = default;
};

// First matching rule in priority order wins. The rule set must have
// unique priorities and end in a rule that always matches.
class AnswerTypeClassifier {
 public:
  explicit AnswerTypeClassifier(ClassifierThresholds thresholds = {},
                                std::vector<ClassifierRule> rule_set = default_classifier_rules())
      : thresholds_(thresholds), rules_(std::move(rule_set)) {
    if (rules_.empty()) throw ConfigError("classifier rule set is empty");
    std::sort(rules_.begin(), rules_.end(),
              [](const auto& a, const auto& b) { return a.priority < b.priority; });
    for (std::size_t i = 1; i < rules_.size(); ++i) {
      if (rules_[i].priority == rules_[i - 1].priority) {
        throw ConfigError("duplicate classifier rule priority " +
                          std::to_string(rules_[i].priority));
      }
    }
  }

  Classification classify(std::string_view question, std::string_view gold) const {
    const ClassifierInput in = make_classifier_input(question, gold);
    for (const auto& r : rules_) {
      if (r.predicate(in, thresholds_)) return {r.emits, r.id};
    }
    throw Error("classifier rule set is not total: no rule matched '" + in.gold + "'");
  }

  const ClassifierThresholds& thresholds() const { return thresholds_; }
  const std::vector<ClassifierRule>& rule_set() const { return rules_; }

 private:
  ClassifierThresholds thresholds_;
  std::vector<ClassifierRule> rules_;
};

inline Classification classify_answer_type(std::string_view question, std::string_view gold,
                                           const ClassifierThresholds& thresholds = {}) {
  return AnswerTypeClassifier(thresholds).classify(question, gold);
}

// Multi-gold records are classified on their first gold answer.
inline Classification classify_record(const QARecord& r, const AnswerTypeClassifier& c) {
  return c.classify(r.question, r.gold_answers.front());
}

// AnswerType -> metric map, total over all sixteen types. `fallback` (and
// any per-type override in `type_fallbacks`) must be a built-in metric.
struct RoutingTable {
  std::map<AnswerType, MetricId> routes;
  MetricId fallback;
  std::map<AnswerType, MetricId> type_fallbacks;
  ClassifierThresholds classifier;

  const MetricId& route(AnswerType t) const {
    auto it = routes.find(t);
    if (it == routes.end()) {
      throw ConfigError("routing table missing: " + std::string(to_string(t)));
    }
    return it->second;
  }

  const MetricId& fallback_for(AnswerType t) const {
    auto it = type_fallbacks.find(t);
    return it == type_fallbacks.end() ? fallback : it->second;
  }

  bool operator==(const RoutingTable&) const = default;
};

// Short forms go to exact match, phrases and sentences to token F1,
// equations and code to character-level similarity, and long forms to an
// external learned grader when one is given (falling back to ROUGE-L),
// otherwise straight to ROUGE-L.
inline RoutingTable default_routing_table(
    const std::optional<MetricId>& long_form_grader = std::nullopt) {
  using AT = AnswerType;
  using namespace metric_ids;
  RoutingTable t;
  for (AT type : {AT::kSingleWord, AT::kNumerical, AT::kName, AT::kList, AT::kFormula,
                  AT::kBoolean, AT::kSingleCharacter, AT::kSymbol}) {
    t.routes[type] = kExactMatch;
  }
  t.routes[AT::kPhrase] = kTokenF1;
  t.routes[AT::kSentence] = kTokenF1;
  for (AT type : {AT::kShortParagraph, AT::kParagraph, AT::kLongParagraph, AT::kEssay}) {
    if (long_form_grader) {
      t.routes[type] = *long_form_grader;
      t.type_fallbacks[type] = kRougeL;
    } else {
      t.routes[type] = kRougeL;
    }
  }
  t.routes[AT::kEquation] = kLevenshtein;
  t.routes[AT::kCodeSnippet] = kLevenshtein;
  t.fallback = kTokenF1;
  return t;
}

inline nlohmann::ordered_json routing_table_to_json(const RoutingTable& t) {
  nlohmann::ordered_json j;
  j["routes"] = nlohmann::ordered_json::object();
  for (AnswerType type : kAllAnswerTypes) {
    if (auto it = t.routes.find(type); it != t.routes.end()) {
      j["routes"][std::string(to_string(type))] = it->second.str();
    }
  }
  j["fallback"] = t.fallback.str();
  if (!t.type_fallbacks.empty()) {
    j["type_fallbacks"] = nlohmann::ordered_json::object();
    for (AnswerType type : kAllAnswerTypes) {
      if (auto it = t.type_fallbacks.find(type); it != t.type_fallbacks.end()) {
        j["type_fallbacks"][std::string(to_string(type))] = it->second.str();
      }
    }
  }
  const auto& c = t.classifier;
  j["classifier"] = {
      {"code_min_punct_density", c.code_min_punct_density},
      {"formula_max_tokens", c.formula_max_tokens},
      {"list_min_lines", c.list_min_lines},
      {"list_min_items", c.list_min_items},
      {"list_max_item_tokens", c.list_max_item_tokens},
      {"name_max_tokens", c.name_max_tokens},
      {"phrase_min_tokens", c.phrase_min_tokens},
      {"phrase_max_tokens", c.phrase_max_tokens},
      {"sentence_max_tokens", c.sentence_max_tokens},
      {"short_paragraph_max_sentences", c.short_paragraph_max_sentences},
      {"paragraph_max_sentences", c.paragraph_max_sentences},
      {"long_paragraph_max_sentences", c.long_paragraph_max_sentences},
  };
  return j;
}

namespace detail {

inline MetricId known_metric(const nlohmann::json& v, const MetricRegistry& registry,
                             const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + " must be a metric id string");
  MetricId id(v.get<std::string>());
  if (!registry.contains(id)) throw ConfigError("unknown metric id: " + id.str());
  return id;
}

inline std::map<AnswerType, MetricId> parse_type_map(const nlohmann::json& j,
                                                     const MetricRegistry& registry,
                                                     const std::string& key) {
  if (!j.is_object()) throw ConfigError("'" + key + "' must be an object");
  std::map<AnswerType, MetricId> out;
  for (const auto& [name, value] : j.items()) {
    auto type = parse_answer_type(name);
    if (!type) throw ConfigError("unknown answer type in '" + key + "': " + name);
    out[*type] = known_metric(value, registry, key + "." + name);
  }
  return out;
}

inline ClassifierThresholds parse_thresholds(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("'classifier' must be an object");
  ClassifierThresholds t;
  auto count = [](const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_unsigned()) throw ConfigError("classifier." + key + " must be a non-negative integer");
    return v.get<std::size_t>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "code_min_punct_density") {
      if (!v.is_number() || v.get<double>() < 0.0 || v.get<double>() > 1.0) {
        throw ConfigError("classifier.code_min_punct_density must be a number in [0,1]");
      }
      t.code_min_punct_density = v.get<double>();
    } else if (key == "formula_max_tokens") {
      t.formula_max_tokens = count(v, key);
    } else if (key == "list_min_lines") {
      t.list_min_lines = count(v, key);
    } else if (key == "list_min_items") {
      t.list_min_items = count(v, key);
    } else if (key == "list_max_item_tokens") {
      t.list_max_item_tokens = count(v, key);
    } else if (key == "name_max_tokens") {
      t.name_max_tokens = count(v, key);
    } else if (key == "phrase_min_tokens") {
      t.phrase_min_tokens = count(v, key);
    } else if (key == "phrase_max_tokens") {
      t.phrase_max_tokens = count(v, key);
    } else if (key == "sentence_max_tokens") {
      t.sentence_max_tokens = count(v, key);
    } else if (key == "short_paragraph_max_sentences") {
      t.short_paragraph_max_sentences = count(v, key);
    } else if (key == "paragraph_max_sentences") {
      t.paragraph_max_sentences = count(v, key);
    } else if (key == "long_paragraph_max_sentences") {
      t.long_paragraph_max_sentences = count(v, key);
    } else {
      throw ConfigError("unknown classifier key: " + key);
    }
  }
  if (!(t.short_paragraph_max_sentences <= t.paragraph_max_sentences &&
        t.paragraph_max_sentences <= t.long_paragraph_max_sentences)) {
    throw ConfigError("classifier sentence ladder must be non-decreasing");
  }
  return t;
}

}  // namespace detail

// Parses and validates a routing config document:
//   {"routes": {type: metric}, "fallback": metric,
//    "type_fallbacks"?: {type: metric}, "classifier"?: {threshold: value}}
inline RoutingTable load_routing_table(std::string_view config_text,
                                       const MetricRegistry& registry) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(config_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("routing config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("routing config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "routes" && key != "fallback" && key != "type_fallbacks" && key != "classifier") {
      throw ConfigError("unknown routing config key: " + key);
    }
  }
  if (!j.contains("routes")) throw ConfigError("routing config lacks 'routes'");
  if (!j.contains("fallback")) throw ConfigError("routing config lacks 'fallback'");

  RoutingTable t;
  t.routes = detail::parse_type_map(j["routes"], registry, "routes");
  std::string missing;
  for (AnswerType type : kAllAnswerTypes) {
    if (!t.routes.count(type)) {
      if (!missing.empty()) missing += ", ";
      missing += to_string(type);
    }
  }
  if (!missing.empty()) throw ConfigError("routing table missing: " + missing);

  t.fallback = detail::known_metric(j["fallback"], registry, "fallback");
  if (registry.is_external(t.fallback)) {
    throw ConfigError("fallback must be a built-in metric, got " + t.fallback.str());
  }
  if (j.contains("type_fallbacks")) {
    t.type_fallbacks = detail::parse_type_map(j["type_fallbacks"], registry, "type_fallbacks");
    for (const auto& [type, id] : t.type_fallbacks) {
      if (registry.is_external(id)) {
        throw ConfigError("fallback for " + std::string(to_string(type)) +
                          " must be a built-in metric, got " + id.str());
      }
    }
  }
  if (j.contains("classifier")) t.classifier = detail::parse_thresholds(j["classifier"]);
  return t;
}

struct RoutedScore {
  Score score;
  AnswerType answer_type = AnswerType::kParagraph;
  MetricId metric_used;
  std::string fired_rule;   // "label" when the record carried a trusted type
  bool fallback_used = false;
  std::optional<std::string> failure;  // why the routed metric was skipped
};

struct MogOptions {
  bool force_reclassify = false;
};

// Routed score for one record. The routed metric is skipped in favour of
// the fallback when it is not registered or, for external graders, throws
// (they throw only after exhausting their retries).
inline RoutedScore mog_score(const QARecord& record, const RoutingTable& table,
                             const MetricRegistry& registry, const MetricContext& ctx,
                             const MogOptions& options = {}) {
  RoutedScore out;
  if (record.answer_type && !options.force_reclassify) {
    out.answer_type = *record.answer_type;
    out.fired_rule = "label";
  } else {
    const auto c = classify_record(record, AnswerTypeClassifier(table.classifier));
    out.answer_type = c.type;
    out.fired_rule = c.rule;
  }

  const MetricInput input = metric_input(record);
  const MetricId& routed = table.route(out.answer_type);
  if (registry.contains(routed)) {
    try {
      out.score = registry.evaluate(routed, input, ctx);
      out.metric_used = routed;
      return out;
    } catch (const std::exception& e) {
      // a throwing built-in is a configuration bug, not an outage
      if (!registry.is_external(routed)) throw;
      out.failure = e.what();
    }
  } else {
    out.failure = "metric not registered: " + routed.str();
  }

  const MetricId& fb = table.fallback_for(out.answer_type);
  try {
    out.score = registry.evaluate(fb, input, ctx);
  } catch (const std::exception& e) {
    throw Error("routed metric " + routed.str() + " failed (" + out.failure.value_or("") +
                ") and fallback " + fb.str() + " failed (" + e.what() + ")");
  }
  out.metric_used = fb;
  out.fallback_used = true;
  return out;
}

// One type per record: the trusted label when present (unless forced),
// otherwise the classifier's verdict.
inline std::vector<AnswerType> resolve_answer_types(const Dataset& d,
                                                    const ClassifierThresholds& thresholds = {},
                                                    bool force_reclassify = false) {
  const AnswerTypeClassifier classifier(thresholds);
  std::vector<AnswerType> out;
  out.reserve(d.size());
  for (const auto& r : d.records()) {
    if (r.answer_type && !force_reclassify) {
      out.push_back(*r.answer_type);
    } else {
      out.push_back(classify_record(r, classifier).type);
    }
  }
  return out;
}

inline bool routes_to(const RoutingTable& t, const MetricId& id) {
  if (t.fallback == id) return true;
  for (const auto& [_, m] : t.routes) {
    if (m == id) return true;
  }
  for (const auto& [_, m] : t.type_fallbacks) {
    if (m == id) return true;
  }
  return false;
}

}  // namespace qaeval
