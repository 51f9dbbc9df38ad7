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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "docreward/matching.hpp"
#include "docreward/segmenter.hpp"

namespace docreward {

enum class OrderDenominator { ReferencePairs, MatchedPairs };

std::string_view to_string(OrderDenominator d);
std::optional<OrderDenominator> parse_order_denominator(std::string_view name);

struct RewardConfig {
  double w_dist = 1.0;
  double w_count = 1.0;
  double w_order = 1.0;
  bool clamp_count_at_zero = true;
  OrderDenominator order_denominator = OrderDenominator::ReferencePairs;
  std::optional<double> min_similarity;
  // Re-segment a prediction with broken <ele> tags as plain blocks instead of
  // failing.
  bool fallback_to_plain = false;

  // Throws std::invalid_argument on negative or non-finite weights, or a
  // threshold outside [0, 1].
  void validate() const;
};

struct RewardBreakdown {
  double r_dist = 0.0;
  double r_count = 0.0;
  double r_order = 0.0;
  double total = 0.0;
  std::size_t n_ref = 0;
  std::size_t n_pred = 0;
  std::size_t n_matched = 0;
  std::uint64_t inversions = 0;
  // Prediction was re-read as plain blocks after a tag error.
  bool used_fallback = false;
};

// Mean similarity over matched pairs. 1 when both documents are empty, 0
// when only one is.
double dist_reward(const MatchResult& matches, const Document& reference,
                   const Document& prediction);

// 1 - |n_ref - n_pred| / n_ref, optionally floored at 0.
double count_reward(std::size_t n_ref, std::size_t n_pred, bool clamp = true);

// Pairs i < j with sequence[i] > sequence[j], by merge sort.
std::uint64_t count_inversions(std::span<const std::int64_t> sequence);

double order_reward(const MatchResult& matches, std::size_t n_ref,
                    OrderDenominator denominator = OrderDenominator::ReferencePairs,
                    std::uint64_t* inversions_out = nullptr);

RewardBreakdown multi_aspect_reward(std::string_view prediction, std::string_view reference,
                                    const RewardConfig& config = {},
                                    const NormalizationPolicy& policy = {},
                                    SourceMode mode = SourceMode::PlainBlocks);

// Same pipeline on already segmented documents.
RewardBreakdown multi_aspect_reward(const Document& prediction, const Document& reference,
                                    const RewardConfig& config = {});

struct GroupAdvantages {
  std::vector<double> rewards;
  std::vector<double> advantages;
  double epsilon = 1e-6;
  double mean = 0.0;
  double std_dev = 0.0;
};

inline constexpr std::size_t kDefaultGroupSize = 8;

// (r_i - mean) / (population std + epsilon); all zeros for a constant group.
GroupAdvantages group_advantages(std::span<const double> rewards, double epsilon = 1e-6);

}  // namespace docreward
