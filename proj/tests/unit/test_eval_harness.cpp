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

#include <fstream>
#include <sstream>

#include "docreward/error.hpp"
#include "docreward/eval_harness.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace docreward;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<EvalRecord> fixture_records() {
  std::istringstream lines(slurp(std::string(DOCREWARD_TEST_DATA) + "/eval_dataset.jsonl"));
  std::vector<EvalRecord> out;
  for (std::string line; std::getline(lines, line);) out.push_back(parse_eval_record(line));
  return out;
}

EvalRecord record(std::string id, std::string pred, std::string gt,
                  std::map<std::string, std::string> attrs = {}) {
  return {std::move(id), std::move(pred), std::move(gt), std::move(attrs)};
}

}  // namespace

TEST_CASE("ground truth against itself is perfect") {
  const std::string gt =
      "# T\n\nbody text\n\n| a | b |\n|---|---|\n| 1 | 2 |\n\n$$\nE=mc^2\n$$";
  const auto s = evaluate_document(record("d", gt, gt));
  CHECK(*s.text_ned == 0.0);
  CHECK(*s.formula_ned == 0.0);
  CHECK(*s.table_ned == 0.0);
  CHECK(*s.table_teds == 1.0);
  CHECK(*s.table_teds_s == 1.0);
  CHECK(s.read_order_ned == 0.0);
  CHECK(s.doc_ned == 0.0);
  CHECK(s.overall_edit() == 0.0);
}

TEST_CASE("missing table scores zero without touching text") {
  const std::string gt = "intro words\n\n| a | b |\n|---|---|\n| 1 | 2 |";
  const auto s = evaluate_document(record("d", "intro words", gt));
  CHECK(*s.table_teds == 0.0);
  CHECK(*s.table_ned == 1.0);
  CHECK(*s.text_ned == 0.0);
  CHECK_FALSE(s.formula_ned.has_value());
}

TEST_CASE("reversed text blocks") {
  const auto s = evaluate_document(record("d", "ccc three\n\nbbb two\n\naaa one",
                                          "aaa one\n\nbbb two\n\nccc three"));
  CHECK(*s.text_ned > 0.0);
  CHECK(s.read_order_ned > 0.0);
  CHECK(*s.text_ned == doctest::Approx(oracle::ned("aaa one\n\nbbb two\n\nccc three",
                                                   "ccc three\n\nbbb two\n\naaa one")));
}

TEST_CASE("reading order score") {
  const auto ref = segment_markdown("aaaa\n\nbbbb", SourceMode::PlainBlocks);
  const auto swapped = segment_markdown("bbbb\n\naaaa", SourceMode::PlainBlocks);
  CHECK(reading_order_score(ref, ref) == 0.0);
  const std::string sep = "\xE2\x90\x9F";  // any single code point stands in for the separator
  CHECK(reading_order_score(ref, swapped) ==
        doctest::Approx(oracle::ned("aaaa" + sep + "bbbb", "bbbb" + sep + "aaaa")));
  CHECK(reading_order_score(ref, swapped) == doctest::Approx(8.0 / 9));
  CHECK(reading_order_score(ref, Document{}) == 1.0);
}

TEST_CASE("aggregation") {
  DocScore a, b;
  a.doc_id = "a";
  a.text_ned = 0.1;
  b.doc_id = "b";
  b.text_ned = 0.3;
  b.table_teds = 0.5;
  const std::vector<EvalRecord> recs = {record("a", "", "", {{"g", "x"}}),
                                        record("b", "", "", {{"g", "x"}})};
  const auto report = aggregate({a, b}, recs, "g");
  REQUIRE(report.aggregates.count("x"));
  CHECK(*report.aggregates.at("x").text_ned == doctest::Approx(0.2));
  CHECK(*report.aggregates.at("x").table_teds == doctest::Approx(0.5));
  CHECK(report.aggregates.at("x").n_docs == 2);

  const auto single = aggregate({a}, {recs[0]}, "");
  CHECK(*single.overall.text_ned == doctest::Approx(0.1));
  CHECK(single.aggregates.count("all"));
  CHECK_THROWS_AS(aggregate({a}, {recs[0]}, "missing"), UnknownAttributeKey);
}

TEST_CASE("report emission") {
  const auto empty = emit_report(aggregate({}, {}, ""), ReportFormat::Json);
  CHECK(empty.find("\"per_doc\":[]") != std::string::npos);
  CHECK(empty.find("\"aggregates\":{}") != std::string::npos);

  const auto recs = fixture_records();
  const auto scores = evaluate_all(recs);
  const auto once = emit_report(aggregate(scores, recs, "lang"), ReportFormat::Json);
  const auto twice = emit_report(aggregate(evaluate_all(recs), recs, "lang"), ReportFormat::Json);
  CHECK(once == twice);
  CHECK_THROWS_AS(parse_report_format("xml"), UnsupportedFormat);
}

TEST_CASE("fixture reports match the frozen goldens") {
  const std::string dir = DOCREWARD_TEST_DATA;
  const auto recs = fixture_records();
  const auto report = aggregate(evaluate_all(recs, {}, 3), recs, "lang");
  CHECK(emit_report(report, ReportFormat::Csv) == slurp(dir + "/eval_report_lang.csv"));
  CHECK(emit_report(report, ReportFormat::Json) == slurp(dir + "/eval_report_lang.json"));
  CHECK(emit_report(report, ReportFormat::Markdown) == slurp(dir + "/eval_report_lang.md"));
}

TEST_CASE("absent table columns average over present documents only") {
  const auto recs = fixture_records();
  const auto report = aggregate(evaluate_all(recs), recs, "lang");
  // en: only en-paper-01 carries a table (7-node tree, one differing cell).
  CHECK(*report.aggregates.at("en").table_teds == doctest::Approx(1.0 - 1.0 / 7).epsilon(1e-12));
  CHECK(*report.aggregates.at("zh").table_teds == 0.0);
  CHECK(*report.overall.table_teds == doctest::Approx((1.0 - 1.0 / 7) / 2));
}

TEST_CASE("record parsing") {
  CHECK_THROWS_AS(parse_eval_record("{}"), SchemaError);
  CHECK_THROWS_AS(parse_eval_record("not json"), SchemaError);
  const auto r = parse_eval_record(
      R"({"doc_id":"x","prediction":"p","ground_truth":"g","attributes":{"n":3}})");
  CHECK(r.attributes.at("n") == "3");
}
