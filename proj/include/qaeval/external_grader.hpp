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

// Client for an external learned grader (LLM judge, PEDANTS-style model)
// reachable over HTTP.
//
// Wire contract:
//   POST <endpoint>  {"question": str, "gold_answers": [str], "attempt": str}
//   200 ->           {"score": number in [0,1], "justification"?: str}
// Any other status is a failure.

#include <chrono>
#include <optional>
#include <regex>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "qaeval/errors.hpp"
#include "qaeval/metrics.hpp"
#include "qaeval/qa_data.hpp"
#include "qaeval/score.hpp"

namespace qaeval {

struct ExternalGraderConfig {
  std::string endpoint;  // http://host[:port][/path]
  std::chrono::milliseconds timeout{30000};
  int max_retries = 2;
  std::chrono::milliseconds retry_backoff{100};
  MetricId id{"external_grader"};

  void validate() const {
    if (timeout.count() <= 0) throw ConfigError("grader timeout must be > 0");
    if (max_retries < 0) throw ConfigError("grader max_retries must be >= 0");
    if (retry_backoff.count() < 0) throw ConfigError("grader retry_backoff must be >= 0");
    if (id.str().empty()) throw ConfigError("grader id is empty");
  }
};

struct ExternalGrade {
  Score score;
  std::optional<std::string> justification;
  int attempts = 1;
};

struct Endpoint {
  std::string base;  // scheme://host:port
  std::string path;
};

// Only plain http is supported.
inline Endpoint parse_endpoint(const std::string& url) {
  static const std::regex re(R"(^(http)://([^/:]+)(:(\d+))?(/.*)?$)",
                             std::regex::icase);
  std::smatch m;
  if (!std::regex_match(url, m, re)) {
    throw ConfigError("unsupported grader endpoint (expected http://host[:port]/path): " +
                      url);
  }
  Endpoint e;
  e.base = "http://" + m[2].str() + (m[4].matched ? ":" + m[4].str() : "");
  e.path = m[5].matched ? m[5].str() : "/";
  return e;
}

inline std::string grader_request_body(const MetricInput& input) {
  nlohmann::ordered_json body;
  body["question"] = input.question;
  body["gold_answers"] = nlohmann::ordered_json::array();
  for (const auto& g : input.golds) body["gold_answers"].push_back(g);
  body["attempt"] = input.attempt;
  return body.dump();
}

// Validates a 200 response body. Throws ProtocolError.
inline ExternalGrade parse_grader_response(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("grader response is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("grader response is not a JSON object");
  auto it = j.find("score");
  if (it == j.end() || !it->is_number()) {
    throw ProtocolError("grader response lacks a numeric 'score'");
  }
  const double v = it->get<double>();
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ProtocolError("grader returned out-of-range score " + it->dump());
  }
  ExternalGrade g{Score(v), std::nullopt, 1};
  if (auto jt = j.find("justification"); jt != j.end() && !jt->is_null()) {
    if (!jt->is_string()) throw ProtocolError("grader 'justification' must be a string");
    g.justification = jt->get<std::string>();
  }
  return g;
}

// One POST per attempt, at most 1 + max_retries attempts. Transport
// failures, timeouts and non-200 statuses are retried; a malformed 200
// response is not.
inline ExternalGrade external_grade(const ExternalGraderConfig& cfg,
                                    const MetricInput& input) {
  cfg.validate();
  const Endpoint ep = parse_endpoint(cfg.endpoint);
  const std::string body = grader_request_body(input);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(cfg.timeout - secs);

  std::string last_error;
  const int max_attempts = cfg.max_retries + 1;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    if (attempt > 1 && cfg.retry_backoff.count() > 0) {
      std::this_thread::sleep_for(cfg.retry_backoff);
    }
    httplib::Client client(ep.base);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    auto res = client.Post(ep.path, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    ExternalGrade g = parse_grader_response(res->body);
    g.attempts = attempt;
    return g;
  }
  throw GraderUnavailableError("grader " + cfg.id.str() + " at " + cfg.endpoint +
                                   " failed after " + std::to_string(max_attempts) +
                                   " attempts: " + last_error,
                               max_attempts);
}

inline ExternalGrade external_grade(const ExternalGraderConfig& cfg,
                                    const QARecord& record) {
  return external_grade(cfg, metric_input(record));
}

inline MetricFn make_external_metric(ExternalGraderConfig cfg) {
  cfg.validate();
  parse_endpoint(cfg.endpoint);
  return [cfg](const MetricInput& input, const MetricContext&) {
    return external_grade(cfg, input).score;
  };
}

inline void register_external_grader(MetricRegistry& registry,
                                     const ExternalGraderConfig& cfg) {
  registry.register_metric(cfg.id, make_external_metric(cfg), /*external=*/true);
}

}  // namespace qaeval
