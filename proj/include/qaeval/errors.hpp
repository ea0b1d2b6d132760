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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qaeval {

// Base of every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. `line` is 1-based; 0 when no line applies.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error(line == 0 ? reason
                        : reason + " at line " + std::to_string(line)),
        line_(line),
        reason_(reason) {}

  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

// A value violates the [0,1] score invariant.
class ScoreRangeError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration: routing tables, metric contexts, CLI flags.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An analysis precondition is not met (missing human column, n < 2, ...).
class AnalysisError : public Error {
 public:
  using Error::Error;
};

// The external grader answered, but not per the wire contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// The external grader could not be reached after all retries.
class GraderUnavailableError : public Error {
 public:
  GraderUnavailableError(const std::string& what, int attempts)
      : Error(what), attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

}  // namespace qaeval
