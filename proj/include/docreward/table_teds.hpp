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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace docreward {

struct TableNode {
  std::string tag;  // table, thead, tbody, tfoot, tr, td, th
  int colspan = 1;
  int rowspan = 1;
  std::string content;  // whitespace-normalized text, cells only
  std::vector<std::size_t> children;

  bool is_cell() const { return tag == "td" || tag == "th"; }
};

// Rooted ordered tree; nodes[0] is the root <table>, children listed in
// source order.
struct TableTree {
  std::vector<TableNode> nodes;

  std::size_t size() const { return nodes.size(); }
  const TableNode& root() const { return nodes.front(); }

  // Appends a node under `parent` and returns its index.
  std::size_t add(std::size_t parent, TableNode node);
};

inline constexpr std::size_t kMaxTableDepth = 64;

// Parses the first <table> in `html`. Tolerates missing </td>, </tr> and
// section close tags; nested tables become subtrees of their cell. Throws
// NoTableFound or DepthLimitExceeded.
TableTree parse_table_html(std::string_view html);

// Header row cells become <th>, body cells <td>; the delimiter row is
// dropped. Throws NoTableFound when no pipe row is present.
TableTree parse_pipe_table(std::string_view markdown);

// Dispatches on content: an HTML <table> anywhere, otherwise a pipe table.
TableTree parse_table(std::string_view source);

// Canonical HTML for a tree: no whitespace between tags, span attributes
// only when greater than one, escaped cell text.
std::string to_html(const TableTree& tree);

struct TedsCostModel {
  double insert_cost = 1.0;
  double delete_cost = 1.0;
  bool structure_only = false;

  // 1 on tag or span mismatch; content NED for two cells (0 under
  // structure_only); 0 otherwise.
  double rename_cost(const TableNode& a, const TableNode& b) const;
};

double tree_edit_distance(const TableTree& t1, const TableTree& t2,
                          const TedsCostModel& model = {});

struct TedsResult {
  double score = 0.0;
  bool table_missing = false;  // either side had no parseable table
};

// 1 - distance / max(|t1|, |t2|), clamped to [0, 1]. A side without a table
// scores 0 with `table_missing` set instead of throwing.
TedsResult teds_detailed(std::string_view pred, std::string_view gt, bool structure_only);

double teds(std::string_view pred, std::string_view gt, bool structure_only = false);

}  // namespace docreward
