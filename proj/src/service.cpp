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

#include "docreward/service.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "docreward/error.hpp"
#include "docreward/eval_harness.hpp"
#include "docreward/json_io.hpp"
#include "httplib.h"

namespace docreward::service {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

Reply error_reply(int status, std::string_view message) {
  ordered_json j;
  j["error"] = message;
  j["status"] = status;
  return {status, j.dump()};
}

std::optional<SourceMode> mode_from_json(const json& value) {
  if (!value.is_string()) throw SchemaError("'mode' must be a string");
  const std::string name = value.get<std::string>();
  if (name == "auto") return std::nullopt;
  const auto mode = parse_source_mode(name);
  if (!mode) throw SchemaError("'mode' must be auto, ele_tagged or plain_blocks");
  return mode;
}

std::size_t size_field(const json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_unsigned()) {
    throw SchemaError(std::string("'") + key + "' must be a non-negative integer");
  }
  return j[key].get<std::size_t>();
}

std::atomic<bool> g_stop_requested{false};

extern "C" void on_signal(int) { g_stop_requested = true; }

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

ServiceConfig ServiceConfig::from_json_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("service config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("service config must be a JSON object");
  ServiceConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "host") {
      if (!value.is_string()) throw SchemaError("'host' must be a string");
      c.host = value.get<std::string>();
    } else if (key == "port") {
      if (!value.is_number_integer() || value.get<long>() < 0 || value.get<long>() > 65535) {
        throw SchemaError("'port' must be an integer in [0, 65535]");
      }
      c.port = value.get<int>();
    } else if (key == "max_candidates") {
      c.max_candidates = size_field(j, "max_candidates", c.max_candidates);
    } else if (key == "max_body_bytes") {
      c.max_body_bytes = size_field(j, "max_body_bytes", c.max_body_bytes);
    } else if (key == "max_records") {
      c.max_records = size_field(j, "max_records", c.max_records);
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(size_field(j, "threads", c.threads));
    } else if (key == "reward") {
      c.reward = apply_overrides(c.reward, value);
    } else if (key == "policy") {
      c.policy = apply_overrides(c.policy, value);
    } else if (key == "mode") {
      c.mode = mode_from_json(value);
    } else {
      throw SchemaError("unknown service config key '" + key + "'");
    }
  }
  if (c.threads == 0) c.threads = 1;
  c.digest = sha256_hex(text);
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot read service config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

RewardService::RewardService(ServiceConfig config)
    : config_(std::move(config)), started_(std::chrono::steady_clock::now()) {
  if (config_.digest.empty()) {
    ordered_json canonical;
    canonical["reward"] = to_json(config_.reward);
    canonical["policy"] = to_json(config_.policy);
    config_.digest = sha256_hex(canonical.dump());
  }
}

Reply RewardService::reward(std::string_view body) const {
  const auto start = std::chrono::steady_clock::now();
  if (body.size() > config_.max_body_bytes) {
    return error_reply(413, fmt::format("body of {} bytes exceeds limit {}", body.size(),
                                        config_.max_body_bytes));
  }
  json req;
  try {
    req = json::parse(body);
  } catch (const json::parse_error& e) {
    return error_reply(400, std::string("invalid JSON: ") + e.what());
  }
  try {
    if (!req.is_object()) throw SchemaError("request must be a JSON object");
    if (!req.contains("reference") || !req["reference"].is_string()) {
      throw SchemaError("'reference' must be a string");
    }
    if (!req.contains("candidates") || !req["candidates"].is_array()) {
      throw SchemaError("'candidates' must be an array of strings");
    }
    const auto& candidates = req["candidates"];
    if (candidates.empty()) throw SchemaError("'candidates' must not be empty");
    for (const auto& c : candidates) {
      if (!c.is_string()) throw SchemaError("'candidates' must be an array of strings");
    }
    if (candidates.size() > config_.max_candidates) {
      return error_reply(413, fmt::format("{} candidates exceed limit {}", candidates.size(),
                                          config_.max_candidates));
    }
    for (const auto& [key, value] : req.items()) {
      static const std::set<std::string> kKnown = {"reference", "candidates", "config", "policy",
                                                   "mode", "compute_advantages", "epsilon"};
      if (!kKnown.count(key)) throw SchemaError("unknown request field '" + key + "'");
    }

    const RewardConfig cfg =
        apply_overrides(config_.reward, req.contains("config") ? req["config"] : json());
    const NormalizationPolicy policy =
        apply_overrides(config_.policy, req.contains("policy") ? req["policy"] : json());
    const std::string reference = req["reference"].get<std::string>();
    std::optional<SourceMode> mode = config_.mode;
    if (req.contains("mode")) mode = mode_from_json(req["mode"]);
    const SourceMode effective_mode = mode.value_or(detect_source_mode(reference));
    bool want_advantages = true;
    if (req.contains("compute_advantages")) {
      if (!req["compute_advantages"].is_boolean()) {
        throw SchemaError("'compute_advantages' must be a boolean");
      }
      want_advantages = req["compute_advantages"].get<bool>();
    }
    double epsilon = 1e-6;
    if (req.contains("epsilon")) {
      if (!req["epsilon"].is_number() || !(req["epsilon"].get<double>() > 0.0)) {
        throw SchemaError("'epsilon' must be a positive number");
      }
      epsilon = req["epsilon"].get<double>();
    }

    ordered_json resp;
    auto breakdowns = ordered_json::array();
    std::vector<double> totals;
    for (const auto& c : candidates) {
      const RewardBreakdown b =
          multi_aspect_reward(c.get<std::string>(), reference, cfg, policy, effective_mode);
      totals.push_back(b.total);
      breakdowns.push_back(to_json(b));
    }
    resp["breakdowns"] = std::move(breakdowns);
    if (want_advantages) resp["advantages"] = group_advantages(totals, epsilon).advantages;
    ordered_json effective = to_json(cfg);
    effective["policy"] = to_json(policy);
    effective["mode"] = to_string(effective_mode);
    resp["effective_config"] = std::move(effective);
    resp["latency_ms"] = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    return {200, resp.dump()};
  } catch (const MalformedTags& e) {
    return error_reply(422, e.what());
  } catch (const SchemaError& e) {
    return error_reply(400, e.what());
  }
}

Reply RewardService::evaluate(std::string_view body) const {
  if (body.size() > config_.max_body_bytes) {
    return error_reply(413, fmt::format("body of {} bytes exceeds limit {}", body.size(),
                                        config_.max_body_bytes));
  }
  json req;
  try {
    req = json::parse(body);
  } catch (const json::parse_error& e) {
    return error_reply(400, std::string("invalid JSON: ") + e.what());
  }
  try {
    if (!req.is_object() || !req.contains("records") || !req["records"].is_array()) {
      throw SchemaError("'records' must be an array of evaluation records");
    }
    const auto& items = req["records"];
    if (items.size() > config_.max_records) {
      return error_reply(413, fmt::format("{} records exceed limit {}", items.size(),
                                          config_.max_records));
    }
    std::string group_by;
    if (req.contains("group_by")) {
      if (!req["group_by"].is_string()) throw SchemaError("'group_by' must be a string");
      group_by = req["group_by"].get<std::string>();
    }
    EvalOptions options;
    options.policy = apply_overrides(config_.policy, req.contains("policy") ? req["policy"] : json());
    if (req.contains("fallback_to_plain")) {
      if (!req["fallback_to_plain"].is_boolean()) {
        throw SchemaError("'fallback_to_plain' must be a boolean");
      }
      options.fallback_to_plain = req["fallback_to_plain"].get<bool>();
    }
    std::vector<EvalRecord> records;
    std::set<std::string> ids;
    for (const auto& item : items) {
      records.push_back(parse_eval_record(item.dump()));
      if (!ids.insert(records.back().doc_id).second) {
        throw SchemaError("duplicate doc_id '" + records.back().doc_id + "'");
      }
    }
    const auto scores = evaluate_all(records, options, 1);
    return {200, emit_report(aggregate(scores, records, group_by), ReportFormat::Json)};
  } catch (const MalformedTags& e) {
    return error_reply(422, e.what());
  } catch (const SchemaError& e) {
    return error_reply(400, e.what());
  } catch (const UnknownAttributeKey& e) {
    return error_reply(400, e.what());
  }
}

Reply RewardService::health() const {
  ordered_json j;
  j["status"] = "ok";
  j["version"] = kVersion;
  j["uptime_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
  j["config_digest"] = config_.digest;
  return {200, j.dump()};
}

void RewardService::bind(httplib::Server& server) const {
  server.set_payload_max_length(config_.max_body_bytes);
  auto respond = [](httplib::Response& res, const Reply& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.Post("/v1/reward", [this, respond](const httplib::Request& req, httplib::Response& res) {
    respond(res, reward(req.body));
  });
  server.Post("/v1/evaluate",
              [this, respond](const httplib::Request& req, httplib::Response& res) {
                respond(res, evaluate(req.body));
              });
  server.Get("/v1/health", [this, respond](const httplib::Request&, httplib::Response& res) {
    respond(res, health());
  });
  server.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          what = e.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(error_reply(500, what).body, "application/json");
      });
}

int serve(const ServiceConfig& config) {
  RewardService service(config);
  httplib::Server server;
  const unsigned threads = config.threads;
  server.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  service.bind(server);

  g_stop_requested = false;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  if (!server.bind_to_port(config.host, config.port)) {
    std::cerr << "cannot bind " << config.host << ":" << config.port << "\n";
    return 1;
  }
  std::thread watcher([&server] {
    while (!g_stop_requested) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  });
  std::cerr << "docreward " << kVersion << " listening on " << config.host << ":" << config.port
            << "\n";
  const bool ok = server.listen_after_bind();
  g_stop_requested = true;
  watcher.join();
  return ok ? 0 : 2;
}

}  // namespace docreward::service
