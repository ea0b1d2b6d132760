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

// In-process HTTP stand-in for an external grader.

#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <httplib.h>
#include <json.hpp>

namespace qaeval::testing {

// Routes:
//   /ok            {"score":0.7,"justification":"Partial explanation"}
//   /out_of_range  {"score":1.5}
//   /not_json      plain text body
//   /slow          sleeps slow_ms then answers like /ok
//   /error500      always HTTP 500
//   /flaky         HTTP 500 for the first two hits, then like /ok
//   /echo          1 if the attempt equals the first gold exactly, else 0
class StubGrader {
 public:
  explicit StubGrader(int slow_ms = 1500) : slow_ms_(slow_ms) {
    auto ok = [](httplib::Response& res) {
      res.set_content(R"({"score":0.7,"justification":"Partial explanation"})",
                      "application/json");
    };
    server_.Post("/ok", [this, ok](const httplib::Request& req, httplib::Response& res) {
      count(req.path);
      ok(res);
    });
    server_.Post("/out_of_range", [this](const httplib::Request& req, httplib::Response& res) {
      count(req.path);
      res.set_content(R"({"score":1.5})", "application/json");
    });
    server_.Post("/not_json", [this](const httplib::Request& req, httplib::Response& res) {
      count(req.path);
      res.set_content("definitely not json", "text/plain");
    });
    server_.Post("/slow", [this, ok](const httplib::Request& req, httplib::Response& res) {
      count(req.path);
      std::this_thread::sleep_for(std::chrono::milliseconds(slow_ms_));
      ok(res);
    });
    server_.Post("/error500", [this](const httplib::Request& req, httplib::Response& res) {
      count(req.path);
      res.status = 500;
      res.set_content("boom", "text/plain");
    });
    server_.Post("/flaky", [this, ok](const httplib::Request& req, httplib::Response& res) {
      if (count(req.path) <= 2) {
        res.status = 500;
        return;
      }
      ok(res);
    });
    server_.Post("/echo", [this](const httplib::Request& req, httplib::Response& res) {
      count(req.path);
      const auto body = nlohmann::json::parse(req.body);
      {
        std::lock_guard<std::mutex> lock(mu_);
        last_body_ = req.body;
      }
      const bool same = body.at("attempt") == body.at("gold_answers").at(0);
      res.set_content(same ? R"({"score":1})" : R"({"score":0})", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubGrader() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  StubGrader(const StubGrader&) = delete;
  StubGrader& operator=(const StubGrader&) = delete;

  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

  int hits(const std::string& path) {
    std::lock_guard<std::mutex> lock(mu_);
    return hits_[path];
  }

  std::string last_body() {
    std::lock_guard<std::mutex> lock(mu_);
    return last_body_;
  }

 private:
  int count(const std::string& path) {
    std::lock_guard<std::mutex> lock(mu_);
    return ++hits_[path];
  }

  int slow_ms_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  std::map<std::string, int> hits_;
  std::string last_body_;
};

// An endpoint on which nothing listens: grab a free port, then release it.
inline std::string unreachable_endpoint() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return "http://127.0.0.1:" + std::to_string(ntohs(addr.sin_port)) + "/grade";
}

}  // namespace qaeval::testing
