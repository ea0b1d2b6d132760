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

// Text normalization, whitespace tokenization, n-gram extraction and the
// TF-IDF model shared by the lexical metrics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qaeval/errors.hpp"
#include "qaeval/utf8.hpp"

namespace qaeval {

// Each step can be toggled independently. The defaults are the usual
// reading-comprehension answer normalization.
struct NormalizationConfig {
  bool lowercase = true;
  bool strip_punctuation = true;
  bool remove_articles = true;  // standalone a / an / the
  bool collapse_whitespace = true;

  bool operator==(const NormalizationConfig&) const = default;
};

namespace detail {

inline bool is_article(std::u32string_view word) {
  auto eq = [&](std::u32string_view art) {
    if (word.size() != art.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i) {
      char32_t c = word[i];
      if (c >= U'A' && c <= U'Z') c += U'a' - U'A';
      if (c != art[i]) return false;
    }
    return true;
  };
  return eq(U"a") || eq(U"an") || eq(U"the");
}

}  // namespace detail

// Applies, in order: lowercase, punctuation removal, article removal and
// whitespace collapsing. Idempotent under every config.
inline std::string normalize(std::string_view text,
                             const NormalizationConfig& config = {}) {
  std::u32string s = utf8::decode(text);

  if (config.lowercase || config.strip_punctuation) {
    std::u32string out;
    out.reserve(s.size());
    for (char32_t c : s) {
      if (config.strip_punctuation && utf8::is_punctuation(c)) continue;
      out.push_back(config.lowercase ? utf8::to_lower(c) : c);
    }
    s = std::move(out);
  }

  if (config.remove_articles) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
      if (utf8::is_whitespace(s[i])) {
        out.push_back(s[i++]);
        continue;
      }
      std::size_t j = i;
      while (j < s.size() && !utf8::is_whitespace(s[j])) ++j;
      std::u32string_view word(s.data() + i, j - i);
      if (!detail::is_article(word)) out.append(word);
      i = j;
    }
    s = std::move(out);
  }

  if (config.collapse_whitespace) {
    std::u32string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char32_t c : s) {
      if (utf8::is_whitespace(c)) {
        pending_space = !out.empty();
        continue;
      }
      if (pending_space) out.push_back(U' ');
      pending_space = false;
      out.push_back(c);
    }
    s = std::move(out);
  }

  return utf8::encode(s);
}

// An ordered sequence of non-empty, whitespace-free tokens.
struct TokenSeq {
  std::vector<std::string> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens[i]; }
  auto begin() const { return tokens.begin(); }
  auto end() const { return tokens.end(); }

  bool operator==(const TokenSeq&) const = default;
};

// Splits on runs of Unicode whitespace. Does not normalize.
inline TokenSeq tokenize(std::string_view text) {
  TokenSeq seq;
  const auto* p = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto len = static_cast<std::int32_t>(text.size());
  std::int32_t i = 0;
  std::int32_t token_start = -1;
  while (i < len) {
    const std::int32_t at = i;
    UChar32 c;
    U8_NEXT(p, i, len, c);
    const bool space = c >= 0 && utf8::is_whitespace(static_cast<char32_t>(c));
    if (space) {
      if (token_start >= 0) {
        seq.tokens.emplace_back(text.substr(token_start, at - token_start));
        token_start = -1;
      }
    } else if (token_start < 0) {
      token_start = at;
    }
  }
  if (token_start >= 0) seq.tokens.emplace_back(text.substr(token_start));
  return seq;
}

inline TokenSeq normalize_and_tokenize(std::string_view text,
                                       const NormalizationConfig& config = {}) {
  return tokenize(normalize(text, config));
}

using NGram = std::vector<std::string>;
using NGramCounts = std::map<NGram, std::size_t>;

// All contiguous n-token windows with multiplicity.
inline NGramCounts ngrams(const TokenSeq& seq, std::size_t n) {
  if (n < 1) throw std::invalid_argument("ngram order must be >= 1");
  NGramCounts counts;
  if (seq.size() < n) return counts;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    ++counts[NGram(seq.tokens.begin() + static_cast<std::ptrdiff_t>(i),
                   seq.tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

inline std::size_t total_count(const NGramCounts& counts) {
  std::size_t total = 0;
  for (const auto& [_, c] : counts) total += c;
  return total;
}

// Sparse vector over a TfIdfModel vocabulary, sorted by index.
struct SparseVector {
  std::vector<std::pair<std::size_t, double>> entries;

  bool is_zero() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const auto& e) { return e.second == 0.0; });
  }
  double component(std::size_t index) const {
    auto it = std::lower_bound(
        entries.begin(), entries.end(), index,
        [](const auto& e, std::size_t i) { return e.first < i; });
    return (it != entries.end() && it->first == index) ? it->second : 0.0;
  }
  double norm() const {
    double ss = 0.0;
    for (const auto& [_, v] : entries) ss += v * v;
    return std::sqrt(ss);
  }
};

// Smoothed inverse document frequencies:
//   idf(t) = ln((1 + N) / (1 + df(t))) + 1
// so every vocabulary term has idf >= 1. Immutable once fitted.
class TfIdfModel {
 public:
  std::size_t document_count() const { return document_count_; }
  std::size_t vocabulary_size() const { return terms_.size(); }

  std::optional<std::size_t> index_of(std::string_view term) const {
    auto it = index_.find(std::string(term));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<double> idf(std::string_view term) const {
    auto i = index_of(term);
    if (!i) return std::nullopt;
    return idf_[*i];
  }

  std::optional<std::size_t> document_frequency(std::string_view term) const {
    auto i = index_of(term);
    if (!i) return std::nullopt;
    return df_[*i];
  }

  double idf_at(std::size_t index) const { return idf_[index]; }
  const std::vector<std::string>& terms() const { return terms_; }

  friend TfIdfModel fit_tfidf(std::span<const TokenSeq> corpus);

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::size_t document_count_ = 0;
};

// Vocabulary indices follow lexicographic term order.
inline TfIdfModel fit_tfidf(std::span<const TokenSeq> corpus) {
  if (corpus.empty()) throw Error("cannot fit TF-IDF on an empty corpus");

  std::map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    std::vector<std::string> distinct(doc.tokens);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (auto& t : distinct) ++df[std::move(t)];
  }

  TfIdfModel m;
  m.document_count_ = corpus.size();
  const double n = static_cast<double>(corpus.size());
  for (auto& [term, count] : df) {
    m.index_.emplace(term, m.terms_.size());
    m.terms_.push_back(term);
    m.df_.push_back(count);
    m.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return m;
}

// Raw term count times idf; out-of-vocabulary tokens are dropped.
inline SparseVector vectorize(const TfIdfModel& model, const TokenSeq& seq) {
  std::map<std::size_t, std::size_t> counts;
  for (const auto& t : seq) {
    if (auto i = model.index_of(t)) ++counts[*i];
  }
  SparseVector v;
  v.entries.reserve(counts.size());
  for (const auto& [i, c] : counts) {
    v.entries.emplace_back(i, static_cast<double>(c) * model.idf_at(i));
  }
  return v;
}

// Cosine of two nonnegative sparse vectors; 0 when either is zero.
inline double cosine(const SparseVector& a, const SparseVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  double dot = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.entries.size() && j < b.entries.size()) {
    if (a.entries[i].first == b.entries[j].first) {
      dot += a.entries[i].second * b.entries[j].second;
      ++i;
      ++j;
    } else if (a.entries[i].first < b.entries[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return std::clamp(dot / (na * nb), 0.0, 1.0);
}

}  // namespace qaeval
