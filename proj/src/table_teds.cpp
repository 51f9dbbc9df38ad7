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

#include "docreward/table_teds.hpp"

#include <algorithm>
#include <charconv>
#include <functional>

#include "docreward/error.hpp"
#include "docreward/html.hpp"
#include "docreward/segmenter.hpp"
#include "docreward/text_distance.hpp"
#include "docreward/unicode.hpp"
#include "text_util.hpp"

namespace docreward {

namespace {

bool is_section(std::string_view tag) {
  return tag == "thead" || tag == "tbody" || tag == "tfoot";
}

int span_attribute(const html::Token& tok, std::string_view key) {
  const auto value = tok.attribute(key);
  if (!value) return 1;
  const std::string_view v = trim(*value);
  int n = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
  if (ec != std::errc{} || n < 1) return 1;
  return n;
}

std::string normalize_cell(std::string_view raw) {
  return normalize_text(raw, NormalizationPolicy{});
}

std::vector<std::string> split_pipe_row(std::string_view line) {
  std::string_view t = trim(line);
  if (starts_with(t, "|")) t.remove_prefix(1);
  if (ends_with(t, "|") && !ends_with(t, "\\|")) t.remove_suffix(1);
  std::vector<std::string> cells;
  std::string cur;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == '\\' && i + 1 < t.size() && t[i + 1] == '|') {
      cur.push_back('|');
      ++i;
    } else if (t[i] == '|') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(t[i]);
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

bool is_delimiter_row(const std::vector<std::string>& cells) {
  if (cells.empty()) return false;
  for (const auto& c : cells) {
    std::string_view t = trim(c);
    if (starts_with(t, ":")) t.remove_prefix(1);
    if (ends_with(t, ":")) t.remove_suffix(1);
    if (t.empty() || t.find_first_not_of('-') != std::string_view::npos) return false;
  }
  return true;
}

void emit_html(const TableTree& tree, std::size_t idx, std::string& out) {
  const TableNode& n = tree.nodes[idx];
  out += '<';
  out += n.tag;
  if (n.colspan > 1) out += " colspan=\"" + std::to_string(n.colspan) + "\"";
  if (n.rowspan > 1) out += " rowspan=\"" + std::to_string(n.rowspan) + "\"";
  out += '>';
  if (n.is_cell()) out += html::escape(n.content);
  for (std::size_t c : n.children) emit_html(tree, c, out);
  out += "</";
  out += n.tag;
  out += '>';
}

// Postorder view used by the Zhang-Shasha recurrences.
struct PostorderTree {
  std::vector<std::size_t> node;  // postorder position -> node index
  std::vector<std::size_t> lml;   // leftmost leaf descendant, in postorder
  std::vector<std::size_t> keyroots;

  explicit PostorderTree(const TableTree& t) {
    std::function<std::size_t(std::size_t)> visit = [&](std::size_t idx) -> std::size_t {
      std::size_t leftmost = SIZE_MAX;
      for (std::size_t c : t.nodes[idx].children) {
        const std::size_t l = visit(c);
        if (leftmost == SIZE_MAX) leftmost = l;
      }
      node.push_back(idx);
      if (leftmost == SIZE_MAX) leftmost = node.size() - 1;
      lml.push_back(leftmost);
      return leftmost;
    };
    if (!t.nodes.empty()) visit(0);
    // A keyroot is the highest node sharing its leftmost leaf.
    std::vector<std::size_t> highest(node.size(), SIZE_MAX);
    for (std::size_t i = 0; i < node.size(); ++i) highest[lml[i]] = i;
    for (std::size_t i = 0; i < node.size(); ++i) {
      if (highest[lml[i]] == i) keyroots.push_back(i);
    }
  }
};

}  // namespace

std::size_t TableTree::add(std::size_t parent, TableNode node) {
  nodes.push_back(std::move(node));
  const std::size_t idx = nodes.size() - 1;
  nodes[parent].children.push_back(idx);
  return idx;
}

TableTree parse_table_html(std::string_view source) {
  const auto tokens = html::tokenize(source);
  auto first = std::find_if(tokens.begin(), tokens.end(), [](const html::Token& t) {
    return t.type == html::Token::Type::StartTag && t.name == "table";
  });
  if (first == tokens.end()) throw NoTableFound("no <table> element in input");

  TableTree tree;
  tree.nodes.push_back(TableNode{"table"});
  std::vector<std::size_t> stack{0};
  auto top = [&]() -> TableNode& { return tree.nodes[stack.back()]; };
  auto innermost_table = [&]() {
    for (std::size_t k = stack.size(); k-- > 0;) {
      if (tree.nodes[stack[k]].tag == "table") return k;
    }
    return std::size_t{0};
  };
  // Pops within the innermost table until `stop` accepts the top node.
  auto pop_until = [&](auto stop) {
    const std::size_t floor = innermost_table();
    while (stack.size() - 1 > floor && !stop(top())) stack.pop_back();
  };
  auto push = [&](TableNode node) {
    if (stack.size() >= kMaxTableDepth) {
      throw DepthLimitExceeded("table nesting deeper than " + std::to_string(kMaxTableDepth));
    }
    stack.push_back(tree.add(stack.back(), std::move(node)));
  };

  for (auto it = std::next(first); it != tokens.end() && !stack.empty(); ++it) {
    const html::Token& tok = *it;
    if (tok.type == html::Token::Type::Text) {
      if (top().is_cell()) top().content += html::decode_entities(tok.text);
      continue;
    }
    const std::string& name = tok.name;
    if (tok.type == html::Token::Type::StartTag) {
      if (name == "table") {
        push(TableNode{"table"});
      } else if (is_section(name)) {
        pop_until([](const TableNode& n) { return n.tag == "table"; });
        push(TableNode{name});
      } else if (name == "tr") {
        pop_until([](const TableNode& n) { return n.tag == "table" || is_section(n.tag); });
        push(TableNode{"tr"});
      } else if (name == "td" || name == "th") {
        pop_until([](const TableNode& n) {
          return n.tag == "tr" || n.tag == "table" || is_section(n.tag);
        });
        if (top().tag != "tr") push(TableNode{"tr"});
        TableNode cell{name};
        cell.colspan = span_attribute(tok, "colspan");
        cell.rowspan = span_attribute(tok, "rowspan");
        push(std::move(cell));
      } else if (name == "br" && top().is_cell()) {
        top().content += ' ';
      }
      continue;
    }
    if (tok.type != html::Token::Type::EndTag) continue;
    if (name == "table") {
      const std::size_t floor = innermost_table();
      stack.resize(floor);
    } else if (name == "td" || name == "th" || name == "tr" || is_section(name)) {
      const std::size_t floor = innermost_table();
      for (std::size_t k = stack.size(); k-- > floor + 1;) {
        if (tree.nodes[stack[k]].tag == name) {
          stack.resize(k);
          break;
        }
      }
    }
  }

  for (auto& n : tree.nodes) {
    if (n.is_cell()) n.content = normalize_cell(n.content);
  }
  return tree;
}

TableTree parse_pipe_table(std::string_view markdown) {
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = 0;
  while (pos <= markdown.size()) {
    const std::size_t nl = markdown.find('\n', pos);
    const std::string_view line =
        markdown.substr(pos, (nl == std::string_view::npos ? markdown.size() : nl) - pos);
    if (starts_with(trim(line), "|")) rows.push_back(split_pipe_row(line));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (rows.empty()) throw NoTableFound("no pipe-table rows in input");

  std::size_t header_rows = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (is_delimiter_row(rows[r])) {
      header_rows = r;
      rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(r));
      break;
    }
  }

  TableTree tree;
  tree.nodes.push_back(TableNode{"table"});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t tr = tree.add(0, TableNode{"tr"});
    for (const auto& cell : rows[r]) {
      TableNode n{r < header_rows ? "th" : "td"};
      n.content = normalize_cell(cell);
      tree.add(tr, std::move(n));
    }
  }
  return tree;
}

TableTree parse_table(std::string_view source) {
  if (ascii_lower(source).find("<table") != std::string::npos) return parse_table_html(source);
  return parse_pipe_table(source);
}

std::string to_html(const TableTree& tree) {
  std::string out;
  if (!tree.nodes.empty()) emit_html(tree, 0, out);
  return out;
}

double TedsCostModel::rename_cost(const TableNode& a, const TableNode& b) const {
  if (a.tag != b.tag || a.colspan != b.colspan || a.rowspan != b.rowspan) return 1.0;
  if (a.is_cell() && !structure_only) return normalized_edit_distance(a.content, b.content);
  return 0.0;
}

double tree_edit_distance(const TableTree& t1, const TableTree& t2, const TedsCostModel& model) {
  const PostorderTree a(t1);
  const PostorderTree b(t2);
  const std::size_t n1 = a.node.size();
  const std::size_t n2 = b.node.size();
  if (n1 == 0) return static_cast<double>(n2) * model.insert_cost;
  if (n2 == 0) return static_cast<double>(n1) * model.delete_cost;

  std::vector<double> rename(n1 * n2);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      rename[i * n2 + j] = model.rename_cost(t1.nodes[a.node[i]], t2.nodes[b.node[j]]);
    }
  }

  std::vector<double> treedist(n1 * n2, 0.0);
  std::vector<double> fd((n1 + 1) * (n2 + 1), 0.0);
  const std::size_t w = n2 + 1;
  for (std::size_t k1 : a.keyroots) {
    for (std::size_t k2 : b.keyroots) {
      const std::size_t il = a.lml[k1];
      const std::size_t jl = b.lml[k2];
      const std::size_t rows = k1 - il + 2;
      const std::size_t cols = k2 - jl + 2;
      fd[0] = 0.0;
      for (std::size_t di = 1; di < rows; ++di) fd[di * w] = fd[(di - 1) * w] + model.delete_cost;
      for (std::size_t dj = 1; dj < cols; ++dj) fd[dj] = fd[dj - 1] + model.insert_cost;
      for (std::size_t di = 1; di < rows; ++di) {
        const std::size_t i = il + di - 1;
        for (std::size_t dj = 1; dj < cols; ++dj) {
          const std::size_t j = jl + dj - 1;
          const double del = fd[(di - 1) * w + dj] + model.delete_cost;
          const double ins = fd[di * w + dj - 1] + model.insert_cost;
          if (a.lml[i] == il && b.lml[j] == jl) {
            const double ren = fd[(di - 1) * w + dj - 1] + rename[i * n2 + j];
            fd[di * w + dj] = std::min({del, ins, ren});
            treedist[i * n2 + j] = fd[di * w + dj];
          } else {
            const double sub = fd[(a.lml[i] - il) * w + (b.lml[j] - jl)] + treedist[i * n2 + j];
            fd[di * w + dj] = std::min({del, ins, sub});
          }
        }
      }
    }
  }
  return treedist[(n1 - 1) * n2 + (n2 - 1)];
}

TedsResult teds_detailed(std::string_view pred, std::string_view gt, bool structure_only) {
  TedsResult r;
  TableTree p, g;
  try {
    p = parse_table(pred);
    g = parse_table(gt);
  } catch (const NoTableFound&) {
    r.table_missing = true;
    return r;
  }
  TedsCostModel model;
  model.structure_only = structure_only;
  const double distance = tree_edit_distance(p, g, model);
  const double denom = static_cast<double>(std::max(p.size(), g.size()));
  r.score = std::clamp(1.0 - distance / denom, 0.0, 1.0);
  return r;
}

double teds(std::string_view pred, std::string_view gt, bool structure_only) {
  return teds_detailed(pred, gt, structure_only).score;
}

}  // namespace docreward
