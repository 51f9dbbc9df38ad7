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
#include <cstdint>
#include <string>
#include <string_view>

namespace docreward {

// Per-operation costs for the weighted edit distance. Distances are counted
// over Unicode code points.
struct EditCosts {
  std::uint32_t insert = 1;
  std::uint32_t remove = 1;
  std::uint32_t substitute = 1;

  bool is_unit() const { return insert == 1 && remove == 1 && substitute == 1; }
};

struct DistanceResult {
  std::size_t distance = 0;
  std::size_t len_ref = 0;
  std::size_t len_pred = 0;
  double ned = 0.0;
};

// Minimum cost of turning `pred` into `ref`. Insertions add code points of
// `ref`, removals drop code points of `pred`. Unit costs dispatch to a
// bit-parallel kernel; both kernels use O(min(n, m)) working memory.
std::uint64_t levenshtein(std::u32string_view ref, std::u32string_view pred,
                          const EditCosts& costs = {});
std::uint64_t levenshtein(std::string_view ref, std::string_view pred,
                          const EditCosts& costs = {});

DistanceResult measure_distance(std::u32string_view ref, std::u32string_view pred);
DistanceResult measure_distance(std::string_view ref, std::string_view pred);

// distance / max(len); 0 when both are empty.
double normalized_edit_distance(std::string_view a, std::string_view b);
double normalized_edit_distance(std::u32string_view a, std::u32string_view b);

double edit_similarity(std::string_view a, std::string_view b);
double edit_similarity(std::u32string_view a, std::u32string_view b);

namespace detail {

// Plain row-by-row dynamic program, any costs.
std::uint64_t levenshtein_dp(std::u32string_view ref, std::u32string_view pred,
                             const EditCosts& costs);

// Hyyrö's blocked bit-vector recurrence, unit costs only.
std::uint64_t levenshtein_bitparallel(std::u32string_view a, std::u32string_view b);

}  // namespace detail

}  // namespace docreward
