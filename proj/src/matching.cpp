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

#include "docreward/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "docreward/text_distance.hpp"
#include "docreward/unicode.hpp"

namespace docreward {

namespace {

// Any constant works for padding: every perfect matching of the padded
// square uses the same number of dummy cells.
constexpr double kDummyCost = 2.0;
constexpr double kTightTolerance = 1e-10;

struct Solution {
  std::vector<std::size_t> col_of_row;
  std::vector<double> u;
  std::vector<double> v;
};

// Shortest augmenting path Hungarian method on an n x n matrix, O(n^3).
// Leaves optimal dual potentials in u/v so the equality subgraph can be
// inspected afterwards.
Solution solve_square(const std::vector<double>& a, std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based; index 0 is the virtual source row/column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Solution s;
  s.col_of_row.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) s.col_of_row[p[j] - 1] = j - 1;
  s.u.assign(u.begin() + 1, u.end());
  s.v.assign(v.begin() + 1, v.end());
  return s;
}

// With optimal duals fixed, the optimal assignments are exactly the perfect
// matchings of the tight-edge subgraph. Walk rows in order and take the
// smallest tight column that still admits a perfect matching.
std::vector<std::size_t> lexicographic_optimum(const std::vector<double>& a, std::size_t n,
                                               const Solution& s) {
  auto tight = [&](std::size_t i, std::size_t j) {
    return std::abs(a[i * n + j] - s.u[i] - s.v[j]) <= kTightTolerance;
  };
  std::vector<std::size_t> col_of_row = s.col_of_row;
  std::vector<std::size_t> row_of_col(n);
  for (std::size_t i = 0; i < n; ++i) row_of_col[col_of_row[i]] = i;

  std::vector<char> visited(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < col_of_row[i]; ++j) {
      if (!tight(i, j)) continue;
      // Row r loses column j to row i and must reach i's old column through
      // an alternating path over rows not yet fixed.
      const std::size_t target = col_of_row[i];
      const std::size_t r = row_of_col[j];
      std::fill(visited.begin(), visited.end(), 0);
      visited[j] = 1;
      std::vector<std::pair<std::size_t, std::size_t>> path;
      auto dfs = [&](auto&& self, std::size_t row) -> bool {
        for (std::size_t c = 0; c < n; ++c) {
          if (visited[c] || !tight(row, c)) continue;
          if (c == target) {
            path.emplace_back(row, c);
            return true;
          }
          const std::size_t next = row_of_col[c];
          if (next <= i) continue;
          visited[c] = 1;
          if (self(self, next)) {
            path.emplace_back(row, c);
            return true;
          }
        }
        return false;
      };
      if (r > i && dfs(dfs, r)) {
        for (const auto& [row, c] : path) {
          col_of_row[row] = c;
          row_of_col[c] = row;
        }
        col_of_row[i] = j;
        row_of_col[j] = i;
        break;
      }
    }
  }
  return col_of_row;
}

}  // namespace

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), cost_(std::move(values)) {
  if (cost_.size() != rows * cols) {
    throw std::invalid_argument("cost matrix needs " + std::to_string(rows * cols) +
                                " values, got " + std::to_string(cost_.size()));
  }
}

CostMatrix build_cost_matrix(const Document& reference, const Document& prediction) {
  std::vector<std::u32string> ref_text, pred_text;
  ref_text.reserve(reference.size());
  pred_text.reserve(prediction.size());
  for (const auto& s : reference.segments) ref_text.push_back(unicode::decode_utf8(s.text));
  for (const auto& s : prediction.segments) pred_text.push_back(unicode::decode_utf8(s.text));

  CostMatrix m(ref_text.size(), pred_text.size());
  for (std::size_t i = 0; i < ref_text.size(); ++i) {
    for (std::size_t j = 0; j < pred_text.size(); ++j) {
      m(i, j) = ref_text[i] == pred_text[j]
                    ? 0.0
                    : normalized_edit_distance(ref_text[i], pred_text[j]);
    }
  }
  return m;
}

MatchResult hungarian_assign(const CostMatrix& matrix, std::optional<double> min_similarity) {
  const std::size_t rows = matrix.rows();
  const std::size_t cols = matrix.cols();
  const std::size_t n = std::max(rows, cols);
  MatchResult result;
  if (rows == 0 || cols == 0) {
    for (std::size_t i = 0; i < rows; ++i) result.unmatched_ref.push_back(i);
    for (std::size_t j = 0; j < cols; ++j) result.unmatched_pred.push_back(j);
    return result;
  }

  std::vector<double> padded(n * n, kDummyCost);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) padded[i * n + j] = matrix(i, j);
  }
  const Solution solution = solve_square(padded, n);
  std::vector<std::size_t> assignment = lexicographic_optimum(padded, n, solution);

  auto real_total = [&](const std::vector<std::size_t>& cols_of_rows) {
    double total = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (cols_of_rows[i] < cols) total += matrix(i, cols_of_rows[i]);
    }
    return total;
  };
  // Guard against a near-tie admitted by the tolerance.
  if (real_total(assignment) > real_total(solution.col_of_row) + 1e-12) {
    assignment = solution.col_of_row;
  }

  std::vector<char> pred_used(cols, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t j = assignment[i];
    if (j >= cols) {
      result.unmatched_ref.push_back(i);
      continue;
    }
    const double cost = matrix(i, j);
    const double similarity = 1.0 - cost;
    if (min_similarity && similarity < *min_similarity) {
      result.unmatched_ref.push_back(i);
      continue;
    }
    pred_used[j] = 1;
    result.pairs.push_back({i, j, similarity});
    result.total_cost += cost;
  }
  for (std::size_t j = 0; j < cols; ++j) {
    if (!pred_used[j]) result.unmatched_pred.push_back(j);
  }
  return result;
}

}  // namespace docreward
