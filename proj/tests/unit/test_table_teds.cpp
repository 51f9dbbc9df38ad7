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

#include <functional>
#include <random>

#include "docreward/error.hpp"
#include "docreward/table_teds.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace docreward;

namespace {

oracle::Tree to_oracle(const TableTree& t) {
  oracle::Tree o;
  std::function<void(std::size_t, int)> visit = [&](std::size_t i, int parent) {
    const int me = static_cast<int>(o.size());
    const auto& n = t.nodes[i];
    o.parent.push_back(parent);
    o.tag.push_back(n.tag);
    o.content.push_back(n.content);
    o.colspan.push_back(n.colspan);
    o.rowspan.push_back(n.rowspan);
    for (std::size_t c : n.children) visit(c, me);
  };
  visit(0, -1);
  return o;
}

TableTree random_tree(std::mt19937_64& rng, std::size_t max_nodes) {
  static const char* kTags[] = {"table", "tr", "td", "th"};
  static const char* kText[] = {"", "a", "ab", "ad", "b", "abc"};
  TableTree t;
  t.nodes.push_back(TableNode{"table"});
  const std::size_t n = 1 + rng() % max_nodes;
  for (std::size_t i = 1; i < n; ++i) {
    TableNode node{kTags[rng() % 4]};
    if (node.is_cell()) node.content = kText[rng() % 6];
    if (rng() % 6 == 0) node.colspan = 2;
    t.add(rng() % t.nodes.size(), node);
  }
  return t;
}

}  // namespace

TEST_CASE("parse html tables") {
  const auto t = parse_table_html("<table><tr><td>a</td></tr></table>");
  REQUIRE(t.size() == 3);
  CHECK(t.root().tag == "table");
  CHECK(t.nodes[1].tag == "tr");
  CHECK(t.nodes[2].tag == "td");
  CHECK(t.nodes[2].content == "a");

  const auto span = parse_table_html("<table><tr><td colspan=\"2\">x</td></tr></table>");
  CHECK(span.nodes[2].colspan == 2);
  CHECK_THROWS_AS(parse_table("no tables here"), NoTableFound);
}

TEST_CASE("pipe tables become header and data rows") {
  const auto t = parse_pipe_table("| a | b |\n|---|---|\n| 1 | 2 |\n| 3 | 4 |");
  REQUIRE(t.root().children.size() == 3);
  CHECK(t.nodes[t.root().children[0]].tag == "tr");
  const auto& header = t.nodes[t.root().children[0]];
  CHECK(t.nodes[header.children[0]].tag == "th");
  CHECK(t.nodes[header.children[1]].content == "b");
  const auto& last = t.nodes[t.root().children[2]];
  CHECK(t.nodes[last.children[1]].tag == "td");
  CHECK(t.nodes[last.children[1]].content == "4");
}

TEST_CASE("html and pipe forms of the same table agree") {
  const std::string md = "| a | b |\n|---|---|\n| 1 | 2 |";
  const std::string html =
      "<table><tr><th>a</th><th>b</th></tr><tr><td>1</td><td>2</td></tr></table>";
  CHECK(teds(md, html) == 1.0);
  CHECK(to_html(parse_table(md)) == to_html(parse_table(html)));
}

TEST_CASE("tree edit distance examples") {
  const auto base = parse_table("<table><tr><td>ab</td></tr></table>");
  CHECK(tree_edit_distance(base, base) == 0.0);
  const auto extra = parse_table("<table><tr><td>ab</td><td></td></tr></table>");
  CHECK(tree_edit_distance(base, extra) == 1.0);
  const auto renamed = parse_table("<table><tr><td>ad</td></tr></table>");
  CHECK(tree_edit_distance(base, renamed) == doctest::Approx(0.5));
  CHECK(tree_edit_distance(base, renamed) ==
        doctest::Approx(oracle::tree_edit_distance(to_oracle(base), to_oracle(renamed))));
  TedsCostModel structure;
  structure.structure_only = true;
  CHECK(tree_edit_distance(base, renamed, structure) == 0.0);
}

TEST_CASE("teds scores") {
  const std::string gt = "<table><tr><td>ab</td></tr><tr><td>c</td></tr></table>";
  const std::string pred = "<table><tr><td>ad</td></tr><tr><td>c</td></tr></table>";
  CHECK(teds(gt, gt) == 1.0);
  CHECK(teds("plain text", gt) == 0.0);
  CHECK(teds_detailed("plain text", gt, false).table_missing);
  CHECK(teds(pred, gt) == doctest::Approx(0.9));
  CHECK(teds(pred, gt, true) == 1.0);
}

TEST_CASE("zhang-shasha agrees with exhaustive mapping search") {
  std::mt19937_64 rng(2024);
  for (int iter = 0; iter < 60; ++iter) {
    const auto a = random_tree(rng, 7), b = random_tree(rng, 7);
    for (bool structure_only : {false, true}) {
      TedsCostModel model;
      model.structure_only = structure_only;
      CHECK(std::abs(tree_edit_distance(a, b, model) -
                     oracle::tree_edit_distance(to_oracle(a), to_oracle(b), structure_only)) <
            1e-9);
    }
  }
}

TEST_CASE("nesting depth is bounded") {
  std::string deep;
  for (std::size_t i = 0; i < kMaxTableDepth + 2; ++i) deep += "<table><tr><td>";
  CHECK_THROWS_AS(parse_table_html(deep), DepthLimitExceeded);
}

TEST_CASE("canonical html round trip") {
  const std::string src =
      "<table><thead><tr><th rowspan=\"2\">k</th><th colspan=\"2\">v</th></tr></thead>"
      "<tbody><tr><td>1</td><td>2</td></tr></tbody></table>";
  const auto t = parse_table(src);
  CHECK(to_html(parse_table(to_html(t))) == to_html(t));
  CHECK(teds(to_html(t), src) == 1.0);
}
