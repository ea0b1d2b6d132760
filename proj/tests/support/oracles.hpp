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

// Independent reference implementations used only by tests. None of these
// call into the library's algorithm code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace qaeval::testing {

// Longest common subsequence by enumerating every subsequence of the
// shorter input (2^n candidates) and testing each against the other.
template <typename T>
std::size_t brute_force_lcs(const std::vector<T>& a, const std::vector<T>& b) {
  const std::vector<T>& s = a.size() <= b.size() ? a : b;
  const std::vector<T>& t = a.size() <= b.size() ? b : a;
  const std::size_t n = s.size();
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const auto len = static_cast<std::size_t>(__builtin_popcount(mask));
    if (len <= best) continue;
    std::size_t j = 0;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask & (1u << i))) continue;
      while (j < t.size() && !(t[j] == s[i])) ++j;
      if (j == t.size()) ok = false;
      else ++j;
    }
    if (ok) best = len;
  }
  return best;
}

// Levenshtein distance straight from the recursive definition over
// suffixes, memoized so that length-8 inputs stay cheap.
template <typename T>
std::size_t recursive_edit_distance(const std::vector<T>& a, const std::vector<T>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> d = [&](std::size_t i, std::size_t j) {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t r;
    if (a[i] == b[j]) {
      r = d(i + 1, j + 1);
    } else {
      r = 1 + std::min({d(i + 1, j), d(i, j + 1), d(i + 1, j + 1)});
    }
    memo[key] = r;
    return r;
  };
  return d(0, 0);
}

struct NaivePrf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Multiset overlap by repeatedly removing matched tokens from a copy.
inline NaivePrf naive_token_prf(const std::vector<std::string>& gold,
                                const std::vector<std::string>& attempt) {
  if (gold.empty() && attempt.empty()) return {1.0, 1.0, 1.0};
  if (gold.empty() || attempt.empty()) return {};
  std::vector<std::string> pool = gold;
  std::size_t common = 0;
  for (const auto& t : attempt) {
    auto it = std::find(pool.begin(), pool.end(), t);
    if (it != pool.end()) {
      pool.erase(it);
      ++common;
    }
  }
  if (common == 0) return {};
  NaivePrf p;
  p.precision = static_cast<double>(common) / static_cast<double>(attempt.size());
  p.recall = static_cast<double>(common) / static_cast<double>(gold.size());
  p.f1 = 2.0 * p.precision * p.recall / (p.precision + p.recall);
  return p;
}

// Textbook Pearson through E[xy] - E[x]E[y] in long double.
inline double closed_form_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  const auto n = static_cast<long double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double cov = sxy - sx * sy / n;
  const long double vx = sxx - sx * sx / n;
  const long double vy = syy - sy * sy / n;
  return static_cast<double>(cov / std::sqrt(vx * vy));
}

// Counts every pair explicitly.
inline double brute_force_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  long double c = 0, d = 0, tx = 0, ty = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j <= i) continue;
      const int sx = (x[i] > x[j]) - (x[i] < x[j]);
      const int sy = (y[i] > y[j]) - (y[i] < y[j]);
      if (sx == 0 && sy == 0) continue;
      if (sx == 0) tx += 1;
      else if (sy == 0) ty += 1;
      else if (sx == sy) c += 1;
      else d += 1;
    }
  }
  return static_cast<double>((c - d) / std::sqrt((c + d + tx) * (c + d + ty)));
}

// Small deterministic generator for fuzz loops (splitmix64).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace qaeval::testing
