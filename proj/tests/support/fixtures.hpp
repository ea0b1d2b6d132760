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

// Test fixtures: a 359-record synthetic dataset with designed summary
// statistics, and the labeled fixture on which routing should beat every
// single metric.

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qaeval/qa_data.hpp"
#include "support/oracles.hpp"

namespace qaeval::testing {

struct SyntheticFixture {
  Dataset dataset;
  double target_mean = 0.0;
  double target_std = 0.0;
  std::map<std::string, std::size_t> target_unique_counts;
};

inline constexpr std::size_t kSyntheticSize = 359;

// Human scores: 142 zeros, 86 ones, and 14 or 15 of each of 0.1 .. 0.9.
// That gives mean 0.4192 and population std 0.4201.
inline std::vector<double> synthetic_score_multiset() {
  std::vector<double> s(142, 0.0);
  s.insert(s.end(), 86, 1.0);
  for (int k = 1; k <= 9; ++k) s.insert(s.end(), k <= 5 ? 15 : 14, k / 10.0);
  return s;
}

inline std::string pseudo_word(char prefix, std::size_t n, std::size_t syllables = 3) {
  static const char* kSyl[] = {"ka", "lo", "mi", "nu", "pe", "ri", "so", "tu", "ve", "zo",
                               "ba", "de", "fi", "go", "hu", "ja", "ke", "ly", "mo", "ne"};
  std::string w(1, prefix);
  for (std::size_t i = 0; i < syllables; ++i) {
    w += kSyl[n % 20];
    n /= 20;
  }
  return w;
}

inline const std::vector<std::string>& filler_vocabulary() {
  static const std::vector<std::string> v = {
      "energy", "plants",  "light",   "water",   "carbon",  "process", "cells",   "oxygen",
      "system", "history", "war",     "treaty",  "market",  "price",   "demand",  "supply",
      "river",  "mountain", "climate", "ocean",  "theory",  "proof",   "number",  "prime",
      "function", "value", "memory",  "network", "signal",  "engine",  "force",   "mass",
      "speed",  "orbit",   "planet",  "star",    "gene",    "protein", "virus",   "immune",
      "law",    "court",   "vote",    "policy",  "city",    "empire",  "trade",   "coast"};
  return v;
}

// Gold shape depends only on the gold index so duplicated golds are
// byte-identical.
inline std::string synthetic_gold(std::size_t g) {
  const AnswerType type = kAllAnswerTypes[g % kAnswerTypeCount];
  Rng rng(1000 + g);
  std::size_t len = 1;
  switch (type) {
    case AnswerType::kPhrase:
    case AnswerType::kName:
    case AnswerType::kList:
    case AnswerType::kFormula:
    case AnswerType::kEquation:
      len = 2 + rng.below(4);
      break;
    case AnswerType::kSentence:
    case AnswerType::kCodeSnippet:
      len = 6 + rng.below(8);
      break;
    case AnswerType::kShortParagraph:
    case AnswerType::kParagraph:
    case AnswerType::kLongParagraph:
    case AnswerType::kEssay:
      len = 14 + rng.below(26);
      break;
    default:
      len = 1;
  }
  if (type == AnswerType::kNumerical) return std::to_string(1000 + g * 7);
  std::string out = pseudo_word('w', g);
  const auto& vocab = filler_vocabulary();
  for (std::size_t i = 1; i < len; ++i) out += " " + vocab[rng.below(vocab.size())];
  return out;
}

// Keeps each gold token with probability `keep`, otherwise substitutes a
// word that is unique to (record, position).
inline std::string synthetic_attempt(const std::string& gold, double keep, std::size_t record) {
  Rng rng(77 + record * 31);
  std::string out;
  std::size_t pos = 0;
  std::size_t start = 0;
  while (start <= gold.size()) {
    std::size_t end = gold.find(' ', start);
    if (end == std::string::npos) end = gold.size();
    const std::string tok = gold.substr(start, end - start);
    if (!out.empty()) out += ' ';
    out += rng.uniform() < keep ? tok : pseudo_word('x', record * 64 + pos, 4);
    ++pos;
    start = end + 1;
  }
  return out;
}

inline SyntheticFixture make_synthetic_fixture() {
  constexpr std::size_t n = kSyntheticSize;
  constexpr std::size_t kQuestions = 352, kGolds = 313, kAttempts = 314, kJustifications = 348,
                        kQuestionTypes = 61;

  std::vector<double> scores = synthetic_score_multiset();
  Rng shuffle_rng(20241017);
  for (std::size_t i = scores.size() - 1; i > 0; --i) {
    std::swap(scores[i], scores[shuffle_rng.below(i + 1)]);
  }

  std::vector<std::string> attempts;
  std::set<std::string> attempt_set;
  std::vector<QARecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    QARecord r;
    char id[16];
    std::snprintf(id, sizeof id, "syn-%03zu", i);
    r.id = id;
    const std::size_t q = i < kQuestions ? i : i - kQuestions;
    r.question = "Question " + std::to_string(q) + ": what about " +
                 filler_vocabulary()[q % filler_vocabulary().size()] + "?";
    const std::size_t g = i < kGolds ? i : i - kGolds;
    r.gold_answers = {synthetic_gold(g)};
    if (i < kAttempts) {
      std::string a = synthetic_attempt(r.gold_answers[0], scores[i], i);
      if (attempt_set.count(a)) a += " " + pseudo_word('y', i, 4);
      attempt_set.insert(a);
      attempts.push_back(a);
      r.attempt = a;
    } else {
      r.attempt = attempts[i - kAttempts];
    }
    r.human_score = Score(scores[i]);
    const std::size_t j = i < kJustifications ? i : i - kJustifications;
    r.justification = "Rationale " + std::to_string(j) + ".";
    r.question_type = "qtype-" + std::to_string(i % kQuestionTypes);
    r.answer_type = kAllAnswerTypes[i % kAnswerTypeCount];
    records.push_back(std::move(r));
  }

  SyntheticFixture f;
  f.dataset = Dataset(std::move(records), "synthetic");

  // Targets straight from the score multiset, in long double.
  const auto multiset = synthetic_score_multiset();
  long double sum = 0;
  for (double v : multiset) sum += v;
  const long double mean = sum / multiset.size();
  long double ss = 0;
  for (double v : multiset) ss += (v - mean) * (v - mean);
  f.target_mean = static_cast<double>(mean);
  f.target_std = static_cast<double>(std::sqrt(ss / multiset.size()));
  f.target_unique_counts = {{"question", kQuestions},  {"gold", kGolds},
                            {"attempt", kAttempts},    {"justification", kJustifications},
                            {"question_type", kQuestionTypes}, {"answer_type", kAnswerTypeCount}};
  return f;
}

// Short-form records where exact match agrees with the human score, and
// long-form records whose human score sits near ROUGE-L.
inline Dataset make_routing_fixture() {
  struct Row {
    const char* question;
    const char* gold;
    const char* attempt;
    double human;
    AnswerType type;
  };
  using AT = AnswerType;
  const Row rows[] = {
      {"What is the capital of France?", "Paris", "Paris", 1.0, AT::kSingleWord},
      {"Who wrote Hamlet?", "William Shakespeare", "William Wordsworth", 0.0, AT::kName},
      {"What is 15% of 200?", "30", "20", 0.0, AT::kNumerical},
      {"Is water a compound?", "Yes", "yes", 1.0, AT::kBoolean},
      {"Which planet is the largest?", "Jupiter", "Saturn", 0.0, AT::kSingleWord},
      {"Name the primary colors.", "red, yellow, blue", "red, yellow, blue", 1.0, AT::kList},
      {"Who was the first US president?", "George Washington", "George Bush", 0.0, AT::kName},
      {"What is the chemical symbol of gold?", "Au", "Ag", 0.0, AT::kSingleWord},
      {"What is the square root of 144?", "12", "12", 1.0, AT::kNumerical},
      {"Who painted the Mona Lisa?", "Leonardo da Vinci", "Leonardo DiCaprio", 0.0, AT::kName},
      {"Explain photosynthesis.",
       "Photosynthesis is the process by which green plants convert sunlight into chemical "
       "energy stored in glucose.",
       "Green plants use sunlight to make chemical energy in the form of glucose.", 0.5,
       AT::kShortParagraph},
      {"Describe the water cycle.",
       "Water evaporates from oceans, condenses into clouds, falls as precipitation, and flows "
       "back to the oceans through rivers.",
       "Water evaporates from the ocean and falls as rain, then flows back to the ocean in "
       "rivers.",
       0.55, AT::kParagraph},
      {"Why did the Roman Empire fall?",
       "The Roman Empire fell because of economic decline, military defeats, political "
       "instability, and pressure from migrating tribes along its borders.",
       "Political instability and economic decline weakened the empire while tribes pressed "
       "its borders.",
       0.4, AT::kEssay},
      {"Summarize the causes of World War I.",
       "Militarism, alliances, imperialism, and nationalism created tensions that the "
       "assassination of Archduke Franz Ferdinand turned into war.",
       "The assassination of Archduke Franz Ferdinand started the war amid alliances and "
       "nationalism.",
       0.45, AT::kLongParagraph},
      {"What does a compiler do?",
       "A compiler translates source code written in a high level language into machine code "
       "that a processor can execute.",
       "A compiler translates high level source code into machine code for the processor.",
       0.6, AT::kShortParagraph},
      {"Explain supply and demand.",
       "When demand rises and supply stays fixed, prices go up; when supply rises and demand "
       "stays fixed, prices go down.",
       "Prices go up when demand rises and go down when supply rises.", 0.5, AT::kParagraph},
  };
  std::vector<QARecord> records;
  int i = 0;
  for (const auto& row : rows) {
    QARecord r;
    r.id = "mog-" + std::to_string(++i);
    r.question = row.question;
    r.gold_answers = {row.gold};
    r.attempt = row.attempt;
    r.human_score = Score(row.human);
    r.answer_type = row.type;
    records.push_back(std::move(r));
  }
  return Dataset(std::move(records), "routing-fixture");
}

}  // namespace qaeval::testing
