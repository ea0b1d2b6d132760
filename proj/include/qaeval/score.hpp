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

#include <cmath>
#include <compare>
#include <sstream>

#include "qaeval/errors.hpp"

namespace qaeval {

// A metric or grader output. Always a finite value in [0, 1]; construction
// with anything else throws instead of clamping.
class Score {
 public:
  constexpr Score() = default;

  explicit Score(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      std::ostringstream os;
      os << "score out of range: " << value;
      throw ScoreRangeError(os.str());
    }
  }

  static constexpr Score zero() { return Score(); }
  static Score one() { return Score(1.0); }

  constexpr double value() const { return value_; }

  friend constexpr auto operator<=>(const Score&, const Score&) = default;

 private:
  double value_ = 0.0;
};

}  // namespace qaeval
