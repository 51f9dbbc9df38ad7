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

#include <atomic>
#include <fstream>
#include <random>
#include <thread>

#include "docreward/error.hpp"
#include "docreward/eval_harness.hpp"
#include "docreward/json_io.hpp"
#include "docreward/service.hpp"
#include "doctest.h"
#include "httplib.h"

using namespace docreward;
using namespace docreward::service;
using nlohmann::json;

namespace {

const std::string kRef = "# Heading\n\nFirst paragraph here.\n\nSecond paragraph there.";

nlohmann::ordered_json body_of(const Reply& r) { return nlohmann::ordered_json::parse(r.body); }

std::string reward_request(const std::vector<std::string>& candidates, json extra = json::object()) {
  json req = extra;
  req["reference"] = kRef;
  req["candidates"] = candidates;
  return req.dump();
}

struct LiveServer {
  httplib::Server server;
  RewardService service;
  std::thread thread;
  int port = 0;

  explicit LiveServer(ServiceConfig cfg) : service(std::move(cfg)) {
    server.new_task_queue = [] { return new httplib::ThreadPool(4); };
    service.bind(server);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LiveServer() {
    server.stop();
    thread.join();
  }
};

}  // namespace

TEST_CASE("perfect singleton") {
  RewardService svc{ServiceConfig{}};
  const auto r = svc.reward(reward_request({kRef}));
  REQUIRE(r.status == 200);
  const auto j = body_of(r);
  CHECK(j["breakdowns"][0]["total"] == 3.0);
  CHECK(j["advantages"] == json::array({0.0}));
  CHECK(j["effective_config"]["w_dist"] == 1.0);
  CHECK(j["effective_config"]["mode"] == "plain_blocks");
  CHECK(j["latency_ms"].get<double>() >= 0.0);
}

TEST_CASE("perfect and empty candidates") {
  RewardService svc{ServiceConfig{}};
  const auto j = body_of(svc.reward(reward_request({kRef, ""})));
  CHECK(j["breakdowns"][0]["total"] == 3.0);
  CHECK(j["breakdowns"][1]["total"] == 1.0);
  // Rewards {3, 1}: mean 2, population std 1.
  CHECK(j["advantages"][0].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(j["advantages"][1].get<double>() == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("breakdowns equal direct library calls byte for byte") {
  RewardService svc{ServiceConfig{}};
  const std::vector<std::string> cands = {"# Heading\n\nSecond paragraph there.",
                                          "totally different", kRef + "\n\nextra"};
  const auto j = body_of(svc.reward(reward_request(cands)));
  for (std::size_t i = 0; i < cands.size(); ++i) {
    CHECK(j["breakdowns"][i].dump() == breakdown_json(multi_aspect_reward(cands[i], kRef)));
  }
}

TEST_CASE("request errors") {
  ServiceConfig cfg;
  cfg.max_candidates = 2;
  cfg.max_body_bytes = 4096;
  RewardService svc{cfg};
  CHECK(svc.reward(reward_request({})).status == 400);
  CHECK(svc.reward("{not json").status == 400);
  CHECK(svc.reward(R"({"candidates":["a"]})").status == 400);
  CHECK(svc.reward(reward_request({"a"}, {{"config", {{"w_bogus", 1}}}})).status == 400);
  CHECK(svc.reward(reward_request({"a"}, {{"unknown", 1}})).status == 400);
  CHECK(svc.reward(reward_request({"a"}, {{"epsilon", 0}})).status == 400);
  CHECK(svc.reward(reward_request({"a", "b", "c"})).status == 413);
  CHECK(svc.reward(reward_request({std::string(5000, 'x')})).status == 413);

  json tagged = {{"reference", "<ele>a</ele>"}, {"candidates", {"<ele>a"}}};
  CHECK(svc.reward(tagged.dump()).status == 422);
  tagged["config"] = {{"fallback_to_plain", true}};
  const auto ok = svc.reward(tagged.dump());
  CHECK(ok.status == 200);
  CHECK(body_of(ok)["breakdowns"][0]["used_fallback"] == true);
}

TEST_CASE("per-request overrides are echoed") {
  RewardService svc{ServiceConfig{}};
  const auto j = body_of(svc.reward(reward_request(
      {kRef}, {{"config", {{"w_order", 0.5}}}, {"policy", {{"lowercase", true}}},
               {"compute_advantages", false}})));
  CHECK(j["breakdowns"][0]["total"] == 2.5);
  CHECK_FALSE(j.contains("advantages"));
  CHECK(j["effective_config"]["w_order"] == 0.5);
  CHECK(j["effective_config"]["policy"]["lowercase"] == true);
}

TEST_CASE("health and config digest") {
  const std::string text = R"({"port": 0, "max_candidates": 16, "reward": {"w_dist": 2}})";
  const auto path = std::filesystem::temp_directory_path() / "docreward_service_cfg.json";
  std::ofstream(path, std::ios::binary) << text;
  const auto cfg = ServiceConfig::load(path);
  CHECK(cfg.max_candidates == 16);
  CHECK(cfg.reward.w_dist == 2.0);
  CHECK(cfg.digest == sha256_hex(text));
  RewardService svc{cfg};
  const auto j = body_of(svc.health());
  CHECK(j["status"] == "ok");
  CHECK(j["uptime_s"].get<double>() >= 0.0);
  CHECK(j["config_digest"] == sha256_hex(text));
  CHECK(j["version"] == std::string(kVersion));
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK_THROWS_AS(ServiceConfig::from_json_text(R"({"colour": 1})"), SchemaError);
}

TEST_CASE("batch evaluation") {
  RewardService svc{ServiceConfig{}};
  const std::string gt = "# T\n\nbody\n\n| a |\n|---|\n| 1 |";
  json req = {{"records", {{{"doc_id", "d"}, {"prediction", gt}, {"ground_truth", gt}}}}};
  const auto r = svc.evaluate(req.dump());
  REQUIRE(r.status == 200);
  const auto j = body_of(r);
  CHECK(j["per_doc"][0]["overall_edit"] == 0.0);
  CHECK(j["per_doc"][0]["table_teds"] == 1.0);

  ServiceConfig small;
  small.max_records = 1;
  req["records"].push_back({{"doc_id", "e"}, {"prediction", ""}, {"ground_truth", "x"}});
  CHECK(RewardService{small}.evaluate(req.dump()).status == 413);
  CHECK(svc.evaluate(R"({"records": [{"doc_id": 1}]})").status == 400);
  CHECK(svc.evaluate(R"({"records": []})").status == 200);
}

TEST_CASE("evaluate over the wire equals the library report") {
  std::ifstream f(std::string(DOCREWARD_TEST_DATA) + "/eval_dataset.jsonl");
  json records = json::array();
  std::vector<EvalRecord> recs;
  for (std::string line; std::getline(f, line);) {
    records.push_back(json::parse(line));
    recs.push_back(parse_eval_record(line));
  }
  LiveServer live{ServiceConfig{}};
  httplib::Client client("127.0.0.1", live.port);
  const json req = {{"records", records}, {"group_by", "lang"}};
  const auto res = client.Post("/v1/evaluate", req.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == emit_report(aggregate(evaluate_all(recs), recs, "lang"), ReportFormat::Json));
}

TEST_CASE("http round trip, body limit and concurrent replay") {
  ServiceConfig cfg;
  cfg.max_body_bytes = 64 * 1024;
  LiveServer live{cfg};
  httplib::Client client("127.0.0.1", live.port);

  const auto health = client.Get("/v1/health");
  REQUIRE(health);
  CHECK(health->status == 200);

  std::vector<std::string> requests;
  std::mt19937_64 rng(5);
  const std::vector<std::string> pool = {kRef, "", "First paragraph here.", "# Heading",
                                         "Second paragraph there.\n\nFirst paragraph here."};
  for (int i = 0; i < 12; ++i) {
    std::vector<std::string> cands;
    for (std::size_t k = 0, n = 1 + rng() % 4; k < n; ++k) cands.push_back(pool[rng() % pool.size()]);
    requests.push_back(reward_request(cands, {{"compute_advantages", true}}));
  }
  auto strip_latency = [](const std::string& body) {
    auto j = json::parse(body);
    j.erase("latency_ms");
    return j.dump();
  };
  std::vector<std::string> serial;
  for (const auto& r : requests) {
    const auto res = client.Post("/v1/reward", r, "application/json");
    REQUIRE(res);
    serial.push_back(strip_latency(res->body));
  }
  std::atomic<int> mismatches{0}, health_failures{0};
  std::vector<std::thread> workers;
  for (int w = 0; w < 4; ++w) {
    workers.emplace_back([&, w] {
      httplib::Client c("127.0.0.1", live.port);
      std::mt19937_64 order(w);
      for (int k = 0; k < 24; ++k) {
        const std::size_t i = order() % requests.size();
        const auto res = c.Post("/v1/reward", requests[i], "application/json");
        if (!res || strip_latency(res->body) != serial[i]) ++mismatches;
        const auto h = c.Get("/v1/health");
        if (!h || h->status != 200) ++health_failures;
      }
    });
  }
  for (auto& t : workers) t.join();
  CHECK(mismatches == 0);
  CHECK(health_failures == 0);

  const auto big = client.Post("/v1/reward", std::string(80 * 1024, ' '), "application/json");
  REQUIRE(big);
  CHECK(big->status == 413);
}
