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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "qaeval/errors.hpp"

namespace qaeval {

// The closed set of answer shapes used as the routing key.
enum class AnswerType : std::uint8_t {
  kSingleWord,
  kNumerical,
  kParagraph,
  kCodeSnippet,
  kSentence,
  kEquation,
  kPhrase,
  kName,
  kBoolean,
  kList,
  kSymbol,
  kSingleCharacter,
  kFormula,
  kLongParagraph,
  kEssay,
  kShortParagraph,
};

inline constexpr std::size_t kAnswerTypeCount = 16;

inline constexpr std::array<AnswerType, kAnswerTypeCount> kAllAnswerTypes = {
    AnswerType::kSingleWord,    AnswerType::kNumerical,
    AnswerType::kParagraph,     AnswerType::kCodeSnippet,
    AnswerType::kSentence,      AnswerType::kEquation,
    AnswerType::kPhrase,        AnswerType::kName,
    AnswerType::kBoolean,       AnswerType::kList,
    AnswerType::kSymbol,        AnswerType::kSingleCharacter,
    AnswerType::kFormula,       AnswerType::kLongParagraph,
    AnswerType::kEssay,         AnswerType::kShortParagraph,
};

inline constexpr std::string_view to_string(AnswerType t) {
  switch (t) {
    case AnswerType::kSingleWord: return "single_word";
    case AnswerType::kNumerical: return "numerical";
    case AnswerType::kParagraph: return "paragraph";
    case AnswerType::kCodeSnippet: return "code_snippet";
    case AnswerType::kSentence: return "sentence";
    case AnswerType::kEquation: return "equation";
    case AnswerType::kPhrase: return "phrase";
    case AnswerType::kName: return "name";
    case AnswerType::kBoolean: return "boolean";
    case AnswerType::kList: return "list";
    case AnswerType::kSymbol: return "symbol";
    case AnswerType::kSingleCharacter: return "single_character";
    case AnswerType::kFormula: return "formula";
    case AnswerType::kLongParagraph: return "long_paragraph";
    case AnswerType::kEssay: return "essay";
    case AnswerType::kShortParagraph: return "short_paragraph";
  }
  return "unknown";
}

inline std::optional<AnswerType> parse_answer_type(std::string_view label) {
  for (AnswerType t : kAllAnswerTypes) {
    if (to_string(t) == label) return t;
  }
  return std::nullopt;
}

// Throwing variant for ingestion paths.
inline AnswerType answer_type_from_string(std::string_view label) {
  if (auto t = parse_answer_type(label)) return *t;
  throw ConfigError("unknown answer_type: " + std::string(label));
}

}  // namespace qaeval
