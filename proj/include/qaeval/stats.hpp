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

// Metric-vs-human statistics: mean score delta, Pearson / Spearman /
// Kendall tau-b correlation, correlation matrices, per-answer-type
// breakdowns and score histograms.
//
// Undefined correlations (a constant series, or no usable pairs) are
// std::nullopt, never NaN.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qaeval/answer_type.hpp"
#include "qaeval/errors.hpp"
#include "qaeval/metrics.hpp"

namespace qaeval {

struct ScoreSeries {
  std::string label;
  std::vector<double> values;

  void validate() const {
    for (double v : values) {
      if (!std::isfinite(v)) throw AnalysisError("series '" + label + "' has a non-finite value");
    }
  }
};

namespace detail {

inline void check_pair(std::span<const double> x, std::span<const double> y,
                       std::size_t min_n) {
  if (x.size() != y.size()) {
    throw AnalysisError("series length mismatch: " + std::to_string(x.size()) + " vs " +
                        std::to_string(y.size()));
  }
  if (x.size() < min_n) {
    throw AnalysisError("need at least " + std::to_string(min_n) + " values, got " +
                        std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw AnalysisError("series contain a non-finite value");
    }
  }
}

inline bool is_constant(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

}  // namespace detail

// (sum_i |s_i - h_i|) / n
inline double mean_score_delta(std::span<const double> metric, std::span<const double> human) {
  detail::check_pair(metric, human, 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < metric.size(); ++i) sum += std::abs(metric[i] - human[i]);
  return sum / static_cast<double>(metric.size());
}

inline double mean_score_delta(const ScoreSeries& metric, const ScoreSeries& human) {
  return mean_score_delta(metric.values, human.values);
}

inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y, 2);
  if (detail::is_constant(x) || detail::is_constant(y)) return std::nullopt;
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// 1-based fractional ranks; ties share the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i + j) + 2.0) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y, 2);
  return pearson(average_ranks(x), average_ranks(y));
}

// Tau-b: (C - D) / sqrt((C + D + Tx) * (C + D + Ty)), where Tx counts pairs
// tied only in x and Ty pairs tied only in y. O(n^2).
inline std::optional<double> kendall_tau(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y, 2);
  long long concordant = 0, discordant = 0, tied_x = 0, tied_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        ++tied_x;
      } else if (dy == 0.0) {
        ++tied_y;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const auto cd = static_cast<double>(concordant + discordant);
  const double denom = (cd + static_cast<double>(tied_x)) * (cd + static_cast<double>(tied_y));
  if (denom == 0.0) return std::nullopt;
  return std::clamp(static_cast<double>(concordant - discordant) / std::sqrt(denom), -1.0, 1.0);
}

enum class CorrelationMethod { kPearson, kSpearman, kKendall };

inline constexpr CorrelationMethod kAllCorrelationMethods[] = {
    CorrelationMethod::kPearson, CorrelationMethod::kSpearman, CorrelationMethod::kKendall};

inline constexpr std::string_view to_string(CorrelationMethod m) {
  switch (m) {
    case CorrelationMethod::kPearson: return "pearson";
    case CorrelationMethod::kSpearman: return "spearman";
    case CorrelationMethod::kKendall: return "kendall";
  }
  return "unknown";
}

inline CorrelationMethod parse_correlation_method(std::string_view name) {
  for (auto m : kAllCorrelationMethods) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown correlation method: " + std::string(name));
}

inline std::optional<double> correlate(CorrelationMethod method, std::span<const double> x,
                                       std::span<const double> y) {
  switch (method) {
    case CorrelationMethod::kPearson: return pearson(x, y);
    case CorrelationMethod::kSpearman: return spearman(x, y);
    case CorrelationMethod::kKendall: return kendall_tau(x, y);
  }
  return std::nullopt;
}

inline constexpr std::string_view kHumanLabel = "human";

struct CorrelationMatrix {
  CorrelationMethod method = CorrelationMethod::kPearson;
  std::vector<std::string> labels;  // metric ids, then "human"
  std::vector<std::optional<double>> cells;  // row-major, symmetric
  std::size_t records_used = 0;
  std::size_t records_skipped = 0;  // rows without a human score

  std::size_t size() const { return labels.size(); }
  const std::optional<double>& at(std::size_t i, std::size_t j) const {
    return cells[i * size() + j];
  }
};

namespace detail {

// Columns of `m` (plus human as the last column) restricted to `rows`.
inline std::vector<std::vector<std::optional<double>>> analysis_columns(
    const ScoreMatrix& m, std::span<const std::size_t> rows) {
  std::vector<std::vector<std::optional<double>>> cols(m.cols() + 1);
  for (std::size_t r : rows) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const auto& cell = m.at(r, c);
      cols[c].push_back(cell ? std::optional<double>(cell->value()) : std::nullopt);
    }
    const auto& h = (*m.human)[r];
    cols[m.cols()].push_back(h ? std::optional<double>(h->value()) : std::nullopt);
  }
  return cols;
}

// Pairwise-complete observations of two columns.
inline std::pair<std::vector<double>, std::vector<double>> complete_pairs(
    const std::vector<std::optional<double>>& a, const std::vector<std::optional<double>>& b) {
  std::pair<std::vector<double>, std::vector<double>> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) {
      out.first.push_back(*a[i]);
      out.second.push_back(*b[i]);
    }
  }
  return out;
}

inline std::optional<double> correlate_or_undefined(CorrelationMethod method,
                                                    const std::vector<double>& x,
                                                    const std::vector<double>& y) {
  if (x.size() < 2) return std::nullopt;
  return correlate(method, x, y);
}

inline std::vector<std::size_t> scored_rows(const ScoreMatrix& m) {
  if (!m.has_human()) {
    throw AnalysisError("analysis requires a human score column (human_score)");
  }
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if ((*m.human)[r]) rows.push_back(r);
  }
  return rows;
}

}  // namespace detail

// Symmetric matrix over all metric columns plus "human". Rows without a
// human score are skipped; failed cells are dropped pairwise.
inline CorrelationMatrix correlation_matrix(const ScoreMatrix& m, CorrelationMethod method) {
  const auto rows = detail::scored_rows(m);
  if (rows.size() < 2) {
    throw AnalysisError("correlation needs at least 2 records with a human score, got " +
                        std::to_string(rows.size()));
  }
  const auto cols = detail::analysis_columns(m, rows);

  CorrelationMatrix cm;
  cm.method = method;
  for (const auto& id : m.metric_ids) cm.labels.push_back(id.str());
  cm.labels.emplace_back(kHumanLabel);
  cm.records_used = rows.size();
  cm.records_skipped = m.rows() - rows.size();
  const std::size_t k = cm.labels.size();
  cm.cells.assign(k * k, std::nullopt);

  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      auto [x, y] = detail::complete_pairs(cols[i], cols[j]);
      std::optional<double> v = detail::correlate_or_undefined(method, x, y);
      if (i == j && v) v = 1.0;
      cm.cells[i * k + j] = v;
      cm.cells[j * k + i] = v;
    }
  }
  return cm;
}

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

// Equal-width bins over [0, 1]; every bin is [lo, hi) except the last,
// which is closed.
inline std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo = static_cast<double>(b) / static_cast<double>(bins);
    out[b].hi = static_cast<double>(b + 1) / static_cast<double>(bins);
  }
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw AnalysisError("histogram value outside [0,1]: " + std::to_string(v));
    }
    auto b = static_cast<std::size_t>(v * static_cast<double>(bins));
    ++out[std::min(b, bins - 1)].count;
  }
  return out;
}

inline std::vector<HistogramBin> histogram(const ScoreSeries& s, std::size_t bins) {
  return histogram(s.values, bins);
}

struct BreakdownOptions {
  std::vector<CorrelationMethod> methods{CorrelationMethod::kPearson};
  std::size_t min_support = 3;
  std::size_t bins = 10;
};

struct MetricGroupStats {
  MetricId metric;
  std::size_t n = 0;  // complete (metric, human) pairs
  std::optional<double> mean_delta;
  std::map<CorrelationMethod, std::optional<double>> correlation;  // vs human
  std::vector<HistogramBin> histogram;

  bool operator==(const MetricGroupStats&) const;
};

struct GroupStats {
  std::size_t record_count = 0;  // all records in the group
  std::size_t scored_count = 0;  // records with a human score
  bool low_support = false;
  std::vector<MetricGroupStats> metrics;
  std::vector<HistogramBin> human_histogram;
};

struct TypedBreakdown {
  GroupStats global;
  std::map<AnswerType, GroupStats> per_type;
};

inline bool operator==(const HistogramBin& a, const HistogramBin& b) {
  return a.lo == b.lo && a.hi == b.hi && a.count == b.count;
}

inline bool MetricGroupStats::operator==(const MetricGroupStats& o) const {
  return metric == o.metric && n == o.n && mean_delta == o.mean_delta &&
         correlation == o.correlation && histogram == o.histogram;
}

inline bool operator==(const GroupStats& a, const GroupStats& b) {
  return a.record_count == b.record_count && a.scored_count == b.scored_count &&
         a.low_support == b.low_support && a.metrics == b.metrics &&
         a.human_histogram == b.human_histogram;
}

// Statistics of every metric against human over the rows of one group.
inline GroupStats analyze_group(const ScoreMatrix& m, std::span<const std::size_t> rows,
                                const BreakdownOptions& opts) {
  GroupStats g;
  g.record_count = rows.size();
  std::vector<std::size_t> scored;
  for (std::size_t r : rows) {
    if ((*m.human)[r]) scored.push_back(r);
  }
  g.scored_count = scored.size();
  g.low_support = scored.size() < opts.min_support;

  const auto cols = detail::analysis_columns(m, scored);
  const auto& human = cols.back();
  std::vector<double> human_values;
  for (const auto& h : human) human_values.push_back(*h);
  g.human_histogram = histogram(human_values, opts.bins);

  for (std::size_t c = 0; c < m.cols(); ++c) {
    MetricGroupStats s;
    s.metric = m.metric_ids[c];
    auto [x, y] = detail::complete_pairs(cols[c], human);
    s.n = x.size();
    if (!x.empty()) s.mean_delta = mean_score_delta(x, y);
    for (auto method : opts.methods) {
      s.correlation[method] = detail::correlate_or_undefined(method, x, y);
    }
    s.histogram = histogram(x, opts.bins);
    g.metrics.push_back(std::move(s));
  }
  return g;
}

// Global statistics plus one GroupStats per answer type present in
// `types`, which is aligned with the matrix rows.
inline TypedBreakdown per_type_analysis(const ScoreMatrix& m, std::span<const AnswerType> types,
                                        const BreakdownOptions& opts = {}) {
  if (types.size() != m.rows()) {
    throw AnalysisError("answer type labels do not match the matrix rows");
  }
  detail::scored_rows(m);
  TypedBreakdown out;
  std::vector<std::size_t> all(m.rows());
  std::iota(all.begin(), all.end(), 0);
  out.global = analyze_group(m, all, opts);

  std::map<AnswerType, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < types.size(); ++r) groups[types[r]].push_back(r);
  for (const auto& [type, rows] : groups) {
    out.per_type.emplace(type, analyze_group(m, rows, opts));
  }
  return out;
}

}  // namespace qaeval
