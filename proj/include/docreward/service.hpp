// Copyright 2026 The docreward Authors.
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

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "docreward/reward.hpp"
#include "docreward/segmenter.hpp"

namespace httplib {
class Server;
}

namespace docreward::service {

inline constexpr std::string_view kVersion = DOCREWARD_VERSION;

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t max_candidates = 64;
  std::size_t max_body_bytes = 2 * 1024 * 1024;
  std::size_t max_records = 1024;
  unsigned threads = 8;
  RewardConfig reward;
  NormalizationPolicy policy;
  // Unset: detect per request from the reference (tagged if it has <ele>).
  std::optional<SourceMode> mode;
  // sha256 of the loaded file, or of the canonical config JSON.
  std::string digest;

  static ServiceConfig from_json_text(std::string_view text);
  static ServiceConfig load(const std::filesystem::path& path);
};

struct Reply {
  int status = 200;
  std::string body;
};

// Transport-independent endpoint logic; every handler is const and keeps no
// per-request state.
class RewardService {
 public:
  explicit RewardService(ServiceConfig config);

  Reply reward(std::string_view body) const;    // POST /v1/reward
  Reply evaluate(std::string_view body) const;  // POST /v1/evaluate
  Reply health() const;                         // GET /v1/health

  const ServiceConfig& config() const { return config_; }

  // Registers the /v1 routes on `server` and applies the body limit.
  void bind(httplib::Server& server) const;

 private:
  ServiceConfig config_;
  std::chrono::steady_clock::time_point started_;
};

std::string sha256_hex(std::string_view bytes);

// Blocks until SIGINT/SIGTERM; in-flight requests finish before returning.
int serve(const ServiceConfig& config);

}  // namespace docreward::service
