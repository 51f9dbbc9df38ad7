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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "docreward/error.hpp"
#include "docreward/eval_harness.hpp"
#include "docreward/synth.hpp"
#include "doctest.h"

using namespace docreward;
using namespace docreward::synth;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("docreward_synth_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const char* kTwoColumn = R"(template: two_col_fixture
columns: 2
slot: title heading
slot: a text
slot: b table
slot: c formula
slot: d heading level=2
slot: e text
---
<html><head><style>{{style}}</style></head><body>
<div class="col">{{title}}{{d}}{{e}}</div>
<div class="col">{{a}}{{b}}{{c}}</div>
</body></html>
)";

}  // namespace

TEST_CASE("one-column instantiation") {
  const auto layout = LayoutTemplate::parse(
      "template: simple\ncolumns: 1\nslot: h heading\nslot: p text\n---\n"
      "<style>{{style}}</style><body>{{h}}{{p}}</body>");
  const ContentSample sample{{{BlockKind::Heading, "Title"}, {BlockKind::Text, "Body"}}, "t"};
  const auto page = instantiate_template(layout, sample, 42);
  CHECK(page.html.find("Title") != std::string::npos);
  CHECK(page.html.find("Body") != std::string::npos);
  CHECK(page.ground_truth_md == "# Title\n\nBody");
  CHECK(extract_ground_truth(page.html) == "# Title\n\nBody");
  CHECK(page.page_id == "simple-000000000000002a");

  const auto again = instantiate_template(layout, sample, 42);
  CHECK(again.html == page.html);
  CHECK(again.ground_truth_md == page.ground_truth_md);
  CHECK(instantiate_template(layout, sample, 43).html != page.html);
}

TEST_CASE("template validation") {
  CHECK_THROWS_AS(LayoutTemplate::parse("template: x\nslot: a text\n<b>{{a}}</b>"),
                  UnrecognizedStructure);
  CHECK_THROWS_AS(LayoutTemplate::parse("template: x\nslot: a text\n---\n<b></b>"),
                  UnrecognizedStructure);
  CHECK_THROWS_AS(LayoutTemplate::parse("template: x\nslot: a text\n---\n{{a}}{{b}}"),
                  UnrecognizedStructure);
  CHECK_THROWS_AS(LayoutTemplate::parse("template: x\nslot: a video\n---\n{{a}}"),
                  UnrecognizedStructure);
  const auto layout = LayoutTemplate::parse("template: x\nslot: a text\n---\n{{a}}");
  CHECK_THROWS_AS(instantiate_template(layout, {{{BlockKind::Formula, "x"}}, ""}, 1),
                  SlotKindMismatch);
  CHECK_THROWS_AS(instantiate_template(layout, {}, 1), InsufficientContent);
}

TEST_CASE("ground truth follows slot order, not visual order") {
  const auto layout = LayoutTemplate::parse(kTwoColumn);
  const ContentSample sample{{{BlockKind::Heading, "Heading"},
                              {BlockKind::Text, "alpha   text"},
                              {BlockKind::Table, "| a | b |\n|---|---|\n| 1 | 2 |"},
                              {BlockKind::Formula, "x + y"},
                              {BlockKind::Heading, "Sub"},
                              {BlockKind::Text, "omega"}},
                             ""};
  const auto page = instantiate_template(layout, sample, 5);
  // Independent slot walk: data-order attributes in document order, sorted.
  std::regex attr(R"re(data-order="(\d+)" data-slot="([a-z_]+)")re");
  std::map<int, std::string> by_order;
  for (std::sregex_iterator it(page.html.begin(), page.html.end(), attr), end; it != end; ++it) {
    by_order[std::stoi((*it)[1])] = (*it)[2];
  }
  std::vector<std::string> walked;
  for (const auto& [order, slot] : by_order) walked.push_back(slot);
  std::vector<std::string> declared;
  for (const auto& s : layout.slots) declared.push_back(s.name);
  CHECK(walked == declared);

  std::string expected;
  for (const auto& s : layout.slots) {
    const auto& b = sample.blocks[&s - layout.slots.data()];
    if (!expected.empty()) expected += "\n\n";
    expected += block_markdown(b.kind, b.payload, s.heading_level);
  }
  CHECK(page.ground_truth_md == expected);
  CHECK(extract_ground_truth(page.html) == page.ground_truth_md);
}

TEST_CASE("block markdown mapping") {
  CHECK(block_markdown(BlockKind::Heading, "Results", 2) == "## Results");
  CHECK(block_markdown(BlockKind::Text, "  a \n b  ") == "a b");
  CHECK(block_markdown(BlockKind::Formula, "E=mc^2") == "$$\nE=mc^2\n$$");
  CHECK(block_markdown(BlockKind::Image, "/x.png").empty());
  const auto table = block_markdown(
      BlockKind::Table, "<table><tr><th>a</th><th>b</th></tr><tr><td>1</td><td>2</td></tr>"
                        "<tr><td>3</td><td>4</td></tr></table>");
  std::istringstream rows(table);
  std::vector<std::string> lines;
  for (std::string l; std::getline(rows, l);) lines.push_back(l);
  REQUIRE(lines.size() == 4);  // header, delimiter, two data rows
  CHECK(lines[0].front() == '|');
  CHECK(lines[1].find("---") != std::string::npos);
  const auto spanned = block_markdown(
      BlockKind::Table, "<table><tr><td colspan=\"2\">a</td></tr><tr><td>1</td><td>2</td></tr></table>");
  CHECK(spanned.rfind("<table>", 0) == 0);
}

TEST_CASE("three-column page matches its golden markdown") {
  const auto templates = load_templates(DOCREWARD_SOURCE_DIR "/templates");
  const auto it = std::find_if(templates.begin(), templates.end(),
                               [](const auto& t) { return t.template_id == "three_column"; });
  REQUIRE(it != templates.end());
  const ContentSample sample{
      {{BlockKind::Heading, "Annual Survey"},
       {BlockKind::Text, "Respondents were   asked about   commuting."},
       {BlockKind::Formula, "\\bar{x} = \\frac{1}{n}\\sum x_i"},
       {BlockKind::Heading, "Findings"},
       {BlockKind::Text, "Most people cycle when the weather allows."},
       {BlockKind::Table,
        "<table><tr><th rowspan=\"2\">Mode</th><th colspan=\"2\">Share</th></tr>"
        "<tr><th>2024</th><th>2025</th></tr><tr><td>Bike</td><td>31%</td><td>35%</td></tr></table>"},
       {BlockKind::Text, "Figures are rounded & provisional."},
       {BlockKind::Text, "Printed <draft> copy."}},
      "fixture"};
  const auto page = instantiate_template(*it, sample, 0x5eed);
  const fs::path golden = fs::path(DOCREWARD_TEST_DATA) / "three_column_page.md";
  if (std::getenv("DOCREWARD_UPDATE_GOLDEN")) {
    std::ofstream(golden, std::ios::binary) << page.ground_truth_md;
  }
  CHECK(page.ground_truth_md == slurp(golden));
  CHECK(extract_ground_truth(page.html) == page.ground_truth_md);
}

TEST_CASE("manifest") {
  const auto layout = LayoutTemplate::parse(kTwoColumn);
  ContentPool pool;
  pool.add({BlockKind::Heading, "H"}, "h.txt");
  pool.add({BlockKind::Text, "body"}, "t.txt");
  pool.add({BlockKind::Table, "| a |\n|---|\n| 1 |"}, "x.table.md");
  pool.add({BlockKind::Formula, "x"}, "f.tex");

  const auto empty_dir = scratch("empty");
  const auto csv = build_manifest({}, "", empty_dir, ManifestFormat::Csv);
  CHECK(slurp(csv) == "page_id,html_path,gt_md_path,render_cmd,status\n");
  const auto jsonl = build_manifest({}, "", empty_dir, ManifestFormat::Jsonl);
  CHECK(slurp(jsonl).empty());

  const auto dir = scratch("three");
  const auto pages = generate_corpus({layout}, pool, 3, 11);
  const auto manifest = build_manifest(pages, "render {html_path} {png_path}", dir);
  const std::string first = slurp(manifest);
  CHECK(std::count(first.begin(), first.end(), '\n') == 3);
  std::size_t written = 0;
  for (const auto& e : fs::directory_iterator(dir)) written += e.path() != manifest;
  CHECK(written == 6);
  for (const auto& p : pages) {
    CHECK(slurp(dir / (p.page_id + ".md")) == p.ground_truth_md);
    CHECK(first.find("render " + p.page_id + ".html " + p.page_id + ".png") != std::string::npos);
  }
  build_manifest(pages, "render {html_path} {png_path}", dir);
  CHECK(slurp(manifest) == first);
}

TEST_CASE("render status follows the external command") {
  const auto layout = LayoutTemplate::parse("template: r\nslot: p text\n---\n{{p}}");
  ContentPool pool;
  pool.add({BlockKind::Text, "body"}, "t.txt");
  auto pages = generate_corpus({layout}, pool, 2, 3);
  const auto dir = scratch("render");
  build_manifest(pages, "", dir);
  CHECK(render_pages(pages, "cp {html_path} {png_path}", dir) == 2);
  for (const auto& p : pages) {
    CHECK(p.render_status == RenderStatus::Rendered);
    CHECK(fs::exists(dir / (p.page_id + ".png")));
  }
  auto failing = generate_corpus({layout}, pool, 1, 4);
  CHECK(render_pages(failing, "false", dir) == 0);
  CHECK(failing[0].render_status == RenderStatus::Pending);
}

TEST_CASE("filter rules") {
  const auto layout = LayoutTemplate::parse("template: f\nslot: a text\nslot: b text|image\n---\n{{a}}{{b}}");
  const auto good = instantiate_template(layout, {{{BlockKind::Text, "x"}, {BlockKind::Text, "y"}}, ""}, 1);
  const auto blank = instantiate_template(layout, {{{BlockKind::Text, "  "}, {BlockKind::Text, "y"}}, ""}, 2);
  const auto missing_img =
      instantiate_template(layout, {{{BlockKind::Text, "x"}, {BlockKind::Image, "nope.png"}}, ""}, 3);
  const auto out = filter_pages({good, blank, missing_img}, FilterRules{});
  REQUIRE(out.retained.size() == 1);
  CHECK(out.retained[0].page_id == good.page_id);
  REQUIRE(out.log.size() == 3);
  CHECK_FALSE(out.log[1].retained);
  CHECK_FALSE(out.log[2].retained);
}

TEST_CASE("filter agrees with an independent rule check on random pages") {
  std::vector<LayoutTemplate> layouts;
  for (int n : {2, 5, 8, 9, 12}) {
    std::string text = "template: t" + std::to_string(n) + "\n";
    std::string body = "---\n";
    for (int i = 0; i < n; ++i) {
      text += "slot: s" + std::to_string(i) + " text|heading\n";
      body += "{{s" + std::to_string(i) + "}}";
    }
    layouts.push_back(LayoutTemplate::parse(text + body));
  }
  ContentPool pool;
  pool.add({BlockKind::Text, "words"}, "a");
  pool.add({BlockKind::Text, " "}, "b");
  pool.add({BlockKind::Heading, "Head"}, "c");
  pool.add({BlockKind::Text, std::string(50, 'z')}, "d");
  const auto pages = generate_corpus(layouts, pool, 100, 77);

  FilterRules rules;
  rules.max_blocks = 8;
  rules.max_text_chars_per_slot = 40;
  std::set<std::string> expected;
  for (const auto& p : pages) {
    bool ok = p.blocks.size() >= 1 && p.blocks.size() <= 8;
    for (const auto& b : p.blocks) {
      ok = ok && b.payload.find_first_not_of(" \t\n") != std::string::npos && b.payload.size() <= 40;
    }
    if (ok) expected.insert(p.page_id);
  }
  std::set<std::string> got;
  for (const auto& p : filter_pages(pages, rules).retained) got.insert(p.page_id);
  CHECK(got == expected);
  CHECK(!got.empty());
  CHECK(got.size() < pages.size());
}

TEST_CASE("corpus generation is deterministic across job counts") {
  const auto templates = load_templates(DOCREWARD_SOURCE_DIR "/templates");
  const auto pool = load_content_pool(DOCREWARD_SOURCE_DIR "/data/content");
  CHECK(templates.size() == 3);
  const auto a = generate_corpus(templates, pool, 30, 9, 1);
  const auto b = generate_corpus(templates, pool, 30, 9, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].page_id == b[i].page_id);
    CHECK(a[i].html == b[i].html);
    CHECK(extract_ground_truth(a[i].html) == a[i].ground_truth_md);
    const auto s = evaluate_document({a[i].page_id, a[i].ground_truth_md, a[i].ground_truth_md, {}});
    CHECK(s.overall_edit() == 0.0);
  }
}

TEST_CASE("loaders reject missing directories") {
  CHECK_THROWS_AS(load_templates("/nonexistent/dir"), IoFailure);
  CHECK_THROWS_AS(load_content_pool("/nonexistent/dir"), IoFailure);
}
