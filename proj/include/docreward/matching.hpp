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
#include <optional>
#include <vector>

#include "docreward/segmenter.hpp"

namespace docreward {

// Dense row-major costs; rows are reference segments, columns predicted ones.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), cost_(rows * cols, fill) {}
  CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return cost_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return cost_[r * cols_ + c]; }
  const std::vector<double>& values() const { return cost_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> cost_;
};

struct MatchedPair {
  std::size_t ref_index = 0;
  std::size_t pred_index = 0;
  double similarity = 0.0;

  bool operator==(const MatchedPair&) const = default;
};

struct MatchResult {
  std::vector<MatchedPair> pairs;  // sorted by ref_index
  std::vector<std::size_t> unmatched_ref;
  std::vector<std::size_t> unmatched_pred;
  double total_cost = 0.0;
};

// cost(i, j) = 1 - edit_similarity(ref_i.text, pred_j.text).
CostMatrix build_cost_matrix(const Document& reference, const Document& prediction);

// Minimum-cost one-to-one assignment on a rectangular matrix. Among
// equal-cost optima the pair list that is lexicographically smallest in
// (ref_index, pred_index) order wins. Pairs whose similarity falls below
// `min_similarity` are moved to the unmatched lists after solving; total_cost
// then covers the kept pairs only.
MatchResult hungarian_assign(const CostMatrix& matrix,
                             std::optional<double> min_similarity = std::nullopt);

}  // namespace docreward
