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

// Built-in QA metrics, the metric registry, and batch evaluation into a
// ScoreMatrix. Every metric maps (gold answers, attempt) to a Score in
// [0, 1] and aggregates over multiple golds by taking the maximum.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ranges>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "qaeval/errors.hpp"
#include "qaeval/qa_data.hpp"
#include "qaeval/score.hpp"
#include "qaeval/text_norm.hpp"
#include "qaeval/utf8.hpp"

namespace qaeval {

// Symbolic metric name. Built-ins are listed in builtin_metric_ids();
// external graders register their own.
class MetricId {
 public:
  MetricId() = default;
  explicit MetricId(std::string name) : name_(std::move(name)) {}

  const std::string& str() const { return name_; }

  friend auto operator<=>(const MetricId&, const MetricId&) = default;

 private:
  std::string name_;
};

namespace metric_ids {
inline const MetricId kExactMatch{"exact_match"};
inline const MetricId kTokenF1{"token_f1"};
inline const MetricId kTokenRecall{"token_recall"};
inline const MetricId kBleu{"bleu"};
inline const MetricId kRougeL{"rouge_l"};
inline const MetricId kLevenshtein{"levenshtein"};
inline const MetricId kTfIdfCosine{"tfidf_cosine"};
inline const MetricId kRandomBaseline{"random_baseline"};
}  // namespace metric_ids

inline std::vector<MetricId> builtin_metric_ids() {
  using namespace metric_ids;
  return {kExactMatch, kTokenF1,    kTokenRecall, kBleu,
          kRougeL,     kLevenshtein, kTfIdfCosine, kRandomBaseline};
}

inline bool is_builtin_metric(const MetricId& id) {
  auto ids = builtin_metric_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

struct MetricContext {
  NormalizationConfig normalization;
  std::shared_ptr<const TfIdfModel> tfidf_model;
  std::size_t bleu_max_n = 4;
  double bleu_smoothing_floor = 1e-9;
  bool bleu_brevity_penalty = true;
  std::uint64_t random_seed = 0;

  void validate() const {
    if (bleu_max_n < 1) throw ConfigError("bleu_max_n must be >= 1");
    if (!(bleu_smoothing_floor > 0.0 && bleu_smoothing_floor <= 1.0)) {
      throw ConfigError("bleu_smoothing_floor must be in (0, 1]");
    }
  }
};

// What a metric sees of a record. The question is only used by external
// graders.
struct MetricInput {
  std::string_view question;
  std::span<const std::string> golds;
  std::string_view attempt;
};

inline MetricInput metric_input(const QARecord& r) {
  return {r.question, r.gold_answers, r.attempt};
}

namespace detail {

// Absorbs floating-point excess of a few ulps at the bounds; anything
// further out is a bug and throws.
inline Score to_score(double v) {
  constexpr double kSlack = 1e-12;
  if (v < 0.0 && v > -kSlack) v = 0.0;
  if (v > 1.0 && v < 1.0 + kSlack) v = 1.0;
  return Score(v);
}

template <typename PairFn>
Score max_over_golds(std::span<const std::string> golds, PairFn&& pair_score) {
  if (golds.empty()) throw Error("metric called with no gold answers");
  double best = 0.0;
  for (const auto& g : golds) {
    best = std::max(best, pair_score(std::string_view(g)));
    if (best >= 1.0) break;
  }
  return to_score(best);
}

}  // namespace detail

// Length of the longest common subsequence, O(|a|*|b|) time and
// O(min) memory.
template <std::ranges::random_access_range A, std::ranges::random_access_range B>
std::size_t lcs_length(const A& a, const B& b) {
  const auto n = static_cast<std::size_t>(std::ranges::size(a));
  const auto m = static_cast<std::size_t>(std::ranges::size(b));
  if (n == 0 || m == 0) return 0;
  if (m > n) return lcs_length(b, a);
  std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      if (a[i - 1] == b[j - 1]) {
        cur[j] = prev[j - 1] + 1;
      } else {
        cur[j] = std::max(prev[j], cur[j - 1]);
      }
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

inline std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  return lcs_length(a.tokens, b.tokens);
}

// Unit-cost Levenshtein distance over arbitrary element sequences.
template <std::ranges::random_access_range A, std::ranges::random_access_range B>
std::size_t edit_distance_seq(const A& a, const B& b) {
  const auto n = static_cast<std::size_t>(std::ranges::size(a));
  const auto m = static_cast<std::size_t>(std::ranges::size(b));
  if (n == 0) return m;
  if (m == 0) return n;
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

// Character-level distance, counting Unicode scalar values.
inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  return edit_distance_seq(utf8::decode(a), utf8::decode(b));
}

struct TokenOverlap {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Bag-of-tokens overlap. Both sides empty counts as a perfect match;
// exactly one side empty scores zero.
inline TokenOverlap token_overlap(const TokenSeq& gold, const TokenSeq& attempt) {
  if (gold.empty() && attempt.empty()) return {1.0, 1.0, 1.0};
  if (gold.empty() || attempt.empty()) return {};
  std::map<std::string_view, std::size_t> bag;
  for (const auto& t : gold) ++bag[t];
  std::size_t overlap = 0;
  for (const auto& t : attempt) {
    auto it = bag.find(t);
    if (it != bag.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return {};
  TokenOverlap o;
  o.precision = static_cast<double>(overlap) / static_cast<double>(attempt.size());
  o.recall = static_cast<double>(overlap) / static_cast<double>(gold.size());
  o.f1 = 2.0 * o.precision * o.recall / (o.precision + o.recall);
  return o;
}

// Per-pair scorers over already-normalized inputs.
namespace pair_metrics {

inline double bleu(const TokenSeq& gold, const TokenSeq& attempt,
                   const MetricContext& ctx) {
  if (attempt.empty()) return 0.0;
  const std::size_t top = std::min(ctx.bleu_max_n, attempt.size());
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= top; ++n) {
    const auto cand = ngrams(attempt, n);
    const auto ref = ngrams(gold, n);
    std::size_t clipped = 0;
    for (const auto& [gram, count] : cand) {
      auto it = ref.find(gram);
      if (it != ref.end()) clipped += std::min(count, it->second);
    }
    double p = static_cast<double>(clipped) / static_cast<double>(total_count(cand));
    log_sum += std::log(std::max(p, ctx.bleu_smoothing_floor));
  }
  double bp = 1.0;
  if (ctx.bleu_brevity_penalty && attempt.size() < gold.size()) {
    bp = std::exp(1.0 - static_cast<double>(gold.size()) /
                            static_cast<double>(attempt.size()));
  }
  return bp * std::exp(log_sum / static_cast<double>(top));
}

inline double rouge_l(const TokenSeq& gold, const TokenSeq& attempt) {
  if (gold.empty() && attempt.empty()) return 1.0;
  if (gold.empty() || attempt.empty()) return 0.0;
  const auto lcs = static_cast<double>(lcs_length(gold, attempt));
  if (lcs == 0.0) return 0.0;
  const double recall = lcs / static_cast<double>(gold.size());
  const double precision = lcs / static_cast<double>(attempt.size());
  return 2.0 * precision * recall / (precision + recall);
}

inline double levenshtein(std::u32string_view gold, std::u32string_view attempt) {
  const std::size_t longest = std::max(gold.size(), attempt.size());
  if (longest == 0) return 1.0;
  const auto d = static_cast<double>(edit_distance_seq(gold, attempt));
  return 1.0 - d / static_cast<double>(longest);
}

}  // namespace pair_metrics

inline Score exact_match(std::span<const std::string> golds, std::string_view attempt,
                         const MetricContext& ctx) {
  const std::string a = normalize(attempt, ctx.normalization);
  return detail::max_over_golds(golds, [&](std::string_view g) {
    return normalize(g, ctx.normalization) == a ? 1.0 : 0.0;
  });
}

// Precision/recall/F1 against the gold that maximizes F1.
inline TokenOverlap token_prf(std::span<const std::string> golds,
                              std::string_view attempt, const MetricContext& ctx) {
  if (golds.empty()) throw Error("metric called with no gold answers");
  const TokenSeq a = normalize_and_tokenize(attempt, ctx.normalization);
  TokenOverlap best;
  bool first = true;
  for (const auto& g : golds) {
    auto o = token_overlap(normalize_and_tokenize(g, ctx.normalization), a);
    if (first || o.f1 > best.f1) best = o;
    first = false;
  }
  return best;
}

inline Score token_f1(std::span<const std::string> golds, std::string_view attempt,
                      const MetricContext& ctx) {
  const TokenSeq a = normalize_and_tokenize(attempt, ctx.normalization);
  return detail::max_over_golds(golds, [&](std::string_view g) {
    return token_overlap(normalize_and_tokenize(g, ctx.normalization), a).f1;
  });
}

inline Score token_recall(std::span<const std::string> golds, std::string_view attempt,
                          const MetricContext& ctx) {
  const TokenSeq a = normalize_and_tokenize(attempt, ctx.normalization);
  return detail::max_over_golds(golds, [&](std::string_view g) {
    return token_overlap(normalize_and_tokenize(g, ctx.normalization), a).recall;
  });
}

inline Score bleu(std::span<const std::string> golds, std::string_view attempt,
                  const MetricContext& ctx) {
  ctx.validate();
  const TokenSeq a = normalize_and_tokenize(attempt, ctx.normalization);
  return detail::max_over_golds(golds, [&](std::string_view g) {
    return pair_metrics::bleu(normalize_and_tokenize(g, ctx.normalization), a, ctx);
  });
}

inline Score rouge_l(std::span<const std::string> golds, std::string_view attempt,
                     const MetricContext& ctx) {
  const TokenSeq a = normalize_and_tokenize(attempt, ctx.normalization);
  return detail::max_over_golds(golds, [&](std::string_view g) {
    return pair_metrics::rouge_l(normalize_and_tokenize(g, ctx.normalization), a);
  });
}

inline Score levenshtein_similarity(std::span<const std::string> golds,
                                    std::string_view attempt,
                                    const MetricContext& ctx) {
  const std::u32string a = utf8::decode(normalize(attempt, ctx.normalization));
  return detail::max_over_golds(golds, [&](std::string_view g) {
    return pair_metrics::levenshtein(utf8::decode(normalize(g, ctx.normalization)), a);
  });
}

inline Score tfidf_cosine(std::span<const std::string> golds, std::string_view attempt,
                          const MetricContext& ctx) {
  if (!ctx.tfidf_model) {
    throw ConfigError("tfidf_cosine requires a fitted TF-IDF model");
  }
  const auto& model = *ctx.tfidf_model;
  const SparseVector a = vectorize(model, normalize_and_tokenize(attempt, ctx.normalization));
  return detail::max_over_golds(golds, [&](std::string_view g) {
    return cosine(vectorize(model, normalize_and_tokenize(g, ctx.normalization)), a);
  });
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s,
                           std::uint64_t h = 0xCBF29CE484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace detail

// Uniform pseudo-random score keyed on (seed, record content). Stable across
// platforms and independent of call order.
inline Score random_baseline(std::span<const std::string> golds,
                             std::string_view attempt, const MetricContext& ctx) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const auto& g : golds) {
    h = detail::fnv1a(g, h);
    h = detail::fnv1a("\x1f", h);
  }
  h = detail::fnv1a("\x1e", h);
  h = detail::fnv1a(attempt, h);
  const std::uint64_t x =
      detail::splitmix64(h ^ detail::splitmix64(ctx.random_seed));
  return Score(static_cast<double>(x >> 11) * 0x1.0p-53);
}

using MetricFn = std::function<Score(const MetricInput&, const MetricContext&)>;

struct MetricEntry {
  MetricId id;
  MetricFn fn;
  bool external = false;
};

// Name -> metric lookup. Built-ins are always present; external graders
// are added with register_metric().
class MetricRegistry {
 public:
  static MetricRegistry with_builtins() {
    MetricRegistry r;
    auto add = [&r](const MetricId& id, auto fn) {
      r.entries_.push_back({id,
                            [fn](const MetricInput& in, const MetricContext& ctx) {
                              return fn(in.golds, in.attempt, ctx);
                            },
                            false});
    };
    using namespace metric_ids;
    add(kExactMatch, exact_match);
    add(kTokenF1, token_f1);
    add(kTokenRecall, token_recall);
    add(kBleu, bleu);
    add(kRougeL, rouge_l);
    add(kLevenshtein, levenshtein_similarity);
    add(kTfIdfCosine, tfidf_cosine);
    add(kRandomBaseline, random_baseline);
    return r;
  }

  void register_metric(MetricId id, MetricFn fn, bool external = true) {
    if (id.str().empty()) throw ConfigError("metric id is empty");
    if (contains(id)) throw ConfigError("metric already registered: " + id.str());
    entries_.push_back({std::move(id), std::move(fn), external});
  }

  bool contains(const MetricId& id) const { return find(id) != nullptr; }

  const MetricEntry& at(const MetricId& id) const {
    if (const auto* e = find(id)) return *e;
    throw ConfigError("unknown metric id: " + id.str());
  }

  bool is_external(const MetricId& id) const { return at(id).external; }

  std::vector<MetricId> ids() const {
    std::vector<MetricId> out;
    for (const auto& e : entries_) out.push_back(e.id);
    return out;
  }

  Score evaluate(const MetricId& id, const MetricInput& input,
                 const MetricContext& ctx) const {
    return at(id).fn(input, ctx);
  }

 private:
  const MetricEntry* find(const MetricId& id) const {
    for (const auto& e : entries_) {
      if (e.id == id) return &e;
    }
    return nullptr;
  }

  std::vector<MetricEntry> entries_;
};

// The TF-IDF corpus is every gold answer and every attempt in the dataset.
inline TfIdfModel fit_tfidf_for_dataset(const Dataset& d,
                                        const NormalizationConfig& norm) {
  std::vector<TokenSeq> corpus;
  corpus.reserve(d.size() * 2);
  for (const auto& r : d.records()) {
    for (const auto& g : r.gold_answers) corpus.push_back(normalize_and_tokenize(g, norm));
    corpus.push_back(normalize_and_tokenize(r.attempt, norm));
  }
  return fit_tfidf(corpus);
}

struct CellError {
  std::size_t row = 0;
  MetricId metric;
  std::string message;
};

// Records x metrics table of scores plus the optional human-like column.
// A cell is empty only when an external grader failed for that record.
struct ScoreMatrix {
  std::vector<std::string> record_ids;
  std::vector<MetricId> metric_ids;
  std::vector<std::optional<Score>> cells;  // row-major
  std::optional<std::vector<std::optional<Score>>> human;
  std::vector<CellError> errors;

  std::size_t rows() const { return record_ids.size(); }
  std::size_t cols() const { return metric_ids.size(); }

  const std::optional<Score>& at(std::size_t row, std::size_t col) const {
    return cells[row * cols() + col];
  }
  std::optional<Score>& at(std::size_t row, std::size_t col) {
    return cells[row * cols() + col];
  }

  std::optional<std::size_t> column_index(const MetricId& id) const {
    for (std::size_t c = 0; c < metric_ids.size(); ++c) {
      if (metric_ids[c] == id) return c;
    }
    return std::nullopt;
  }

  std::vector<std::optional<Score>> column(std::size_t col) const {
    std::vector<std::optional<Score>> out;
    out.reserve(rows());
    for (std::size_t r = 0; r < rows(); ++r) out.push_back(at(r, col));
    return out;
  }

  bool has_human() const {
    return human && std::any_of(human->begin(), human->end(),
                                [](const auto& s) { return s.has_value(); });
  }
};

struct EvaluateOptions {
  std::size_t threads = 1;
};

// Scores every record with every requested metric. If tfidf_cosine is
// requested and the context carries no model, one is fitted over `d`.
// External metric failures become empty cells plus a CellError; built-in
// failures propagate.
inline ScoreMatrix evaluate_all(const Dataset& d, std::span<const MetricId> metrics,
                                MetricContext ctx, const MetricRegistry& registry,
                                const EvaluateOptions& options = {}) {
  if (d.empty()) throw AnalysisError("cannot evaluate an empty dataset");
  ctx.validate();
  std::vector<const MetricEntry*> entries;
  for (const auto& id : metrics) entries.push_back(&registry.at(id));
  if (!ctx.tfidf_model &&
      std::find(metrics.begin(), metrics.end(), metric_ids::kTfIdfCosine) != metrics.end()) {
    ctx.tfidf_model =
        std::make_shared<const TfIdfModel>(fit_tfidf_for_dataset(d, ctx.normalization));
  }

  ScoreMatrix m;
  m.metric_ids.assign(metrics.begin(), metrics.end());
  m.cells.resize(d.size() * metrics.size());
  bool any_human = false;
  for (const auto& r : d.records()) {
    m.record_ids.push_back(r.id);
    any_human = any_human || r.human_score.has_value();
  }
  if (any_human) {
    m.human.emplace();
    for (const auto& r : d.records()) m.human->push_back(r.human_score);
  }

  std::mutex error_mutex;
  std::exception_ptr fatal;
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t row = begin; row < end; ++row) {
      const MetricInput input = metric_input(d[row]);
      for (std::size_t col = 0; col < entries.size(); ++col) {
        const auto& e = *entries[col];
        try {
          m.at(row, col) = e.fn(input, ctx);
        } catch (const std::exception& ex) {
          std::lock_guard lock(error_mutex);
          if (!e.external) {
            if (!fatal) fatal = std::current_exception();
            return;
          }
          m.errors.push_back({row, e.id, ex.what()});
        }
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, d.size());
  if (threads == 1) {
    work(0, d.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (d.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(d.size(), begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
  }
  if (fatal) std::rethrow_exception(fatal);

  std::sort(m.errors.begin(), m.errors.end(), [](const CellError& a, const CellError& b) {
    return std::tie(a.row, a.metric) < std::tie(b.row, b.metric);
  });
  return m;
}

inline ScoreMatrix evaluate_all(const Dataset& d, std::span<const MetricId> metrics,
                                const MetricContext& ctx = {}) {
  return evaluate_all(d, metrics, ctx, MetricRegistry::with_builtins());
}

}  // namespace qaeval
