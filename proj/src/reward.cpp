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

#include "docreward/reward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "docreward/error.hpp"

namespace docreward {

namespace {

std::uint64_t merge_count(std::vector<std::int64_t>& v, std::vector<std::int64_t>& scratch,
                          std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t count = merge_count(v, scratch, lo, mid) + merge_count(v, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[i] <= v[j]) {
      scratch[k++] = v[i++];
    } else {
      // v[j] precedes everything left in the first half.
      count += mid - i;
      scratch[k++] = v[j++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return count;
}

void check_bounds(const MatchResult& matches, std::size_t n_ref, std::size_t n_pred) {
  for (const auto& p : matches.pairs) {
    if (p.ref_index >= n_ref || p.pred_index >= n_pred) {
      throw MatchDocumentMismatch("matched pair (" + std::to_string(p.ref_index) + ", " +
                                  std::to_string(p.pred_index) + ") outside documents of size " +
                                  std::to_string(n_ref) + " x " + std::to_string(n_pred));
    }
  }
}

}  // namespace

std::string_view to_string(OrderDenominator d) {
  return d == OrderDenominator::ReferencePairs ? "reference_pairs" : "matched_pairs";
}

std::optional<OrderDenominator> parse_order_denominator(std::string_view name) {
  if (name == "reference_pairs") return OrderDenominator::ReferencePairs;
  if (name == "matched_pairs") return OrderDenominator::MatchedPairs;
  return std::nullopt;
}

void RewardConfig::validate() const {
  for (double w : {w_dist, w_count, w_order}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("reward weights must be finite and non-negative");
    }
  }
  if (min_similarity && !(*min_similarity >= 0.0 && *min_similarity <= 1.0)) {
    throw std::invalid_argument("min_similarity must lie in [0, 1]");
  }
}

double dist_reward(const MatchResult& matches, const Document& reference,
                   const Document& prediction) {
  check_bounds(matches, reference.size(), prediction.size());
  if (reference.empty() && prediction.empty()) return 1.0;
  if (matches.pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : matches.pairs) sum += p.similarity;
  return sum / static_cast<double>(matches.pairs.size());
}

double count_reward(std::size_t n_ref, std::size_t n_pred, bool clamp) {
  if (n_ref == 0) return n_pred == 0 ? 1.0 : 0.0;
  const double diff = n_ref > n_pred ? static_cast<double>(n_ref - n_pred)
                                     : static_cast<double>(n_pred - n_ref);
  const double r = 1.0 - diff / static_cast<double>(n_ref);
  return clamp ? std::max(0.0, r) : r;
}

std::uint64_t count_inversions(std::span<const std::int64_t> sequence) {
  std::vector<std::int64_t> v(sequence.begin(), sequence.end());
  std::vector<std::int64_t> scratch(v.size());
  const std::uint64_t count = merge_count(v, scratch, 0, v.size());
  // v is now sorted, so duplicates are adjacent.
  if (std::adjacent_find(v.begin(), v.end()) != v.end()) {
    throw DuplicateElements("inversion count needs pairwise distinct elements");
  }
  return count;
}

double order_reward(const MatchResult& matches, std::size_t n_ref, OrderDenominator denominator,
                    std::uint64_t* inversions_out) {
  std::vector<MatchedPair> pairs = matches.pairs;
  for (const auto& p : pairs) {
    if (p.ref_index >= n_ref) {
      throw MatchDocumentMismatch("reference index " + std::to_string(p.ref_index) +
                                  " outside document of size " + std::to_string(n_ref));
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const MatchedPair& a, const MatchedPair& b) { return a.ref_index < b.ref_index; });
  std::vector<std::int64_t> order;
  order.reserve(pairs.size());
  for (const auto& p : pairs) order.push_back(static_cast<std::int64_t>(p.pred_index));
  const std::uint64_t inversions = count_inversions(order);
  if (inversions_out) *inversions_out = inversions;

  const std::uint64_t m =
      denominator == OrderDenominator::ReferencePairs ? n_ref : pairs.size();
  const std::uint64_t max_inv = m < 2 ? 0 : m * (m - 1) / 2;
  if (max_inv == 0) return 1.0;
  return 1.0 - static_cast<double>(inversions) / static_cast<double>(max_inv);
}

RewardBreakdown multi_aspect_reward(const Document& prediction, const Document& reference,
                                    const RewardConfig& config) {
  config.validate();
  const MatchResult matches =
      hungarian_assign(build_cost_matrix(reference, prediction), config.min_similarity);
  RewardBreakdown b;
  b.n_ref = reference.size();
  b.n_pred = prediction.size();
  b.n_matched = matches.pairs.size();
  b.r_dist = dist_reward(matches, reference, prediction);
  b.r_count = count_reward(b.n_ref, b.n_pred, config.clamp_count_at_zero);
  b.r_order = order_reward(matches, b.n_ref, config.order_denominator, &b.inversions);
  b.total = config.w_dist * b.r_dist + config.w_count * b.r_count + config.w_order * b.r_order;
  return b;
}

RewardBreakdown multi_aspect_reward(std::string_view prediction, std::string_view reference,
                                    const RewardConfig& config, const NormalizationPolicy& policy,
                                    SourceMode mode) {
  const Document ref_doc = segment_markdown(reference, mode, policy);
  Document pred_doc;
  bool fallback = false;
  try {
    pred_doc = segment_markdown(prediction, mode, policy);
  } catch (const MalformedTags&) {
    if (!config.fallback_to_plain || mode != SourceMode::EleTagged) throw;
    pred_doc = segment_markdown(prediction, SourceMode::PlainBlocks, policy);
    fallback = true;
  }
  RewardBreakdown b = multi_aspect_reward(pred_doc, ref_doc, config);
  b.used_fallback = fallback;
  return b;
}

GroupAdvantages group_advantages(std::span<const double> rewards, double epsilon) {
  if (rewards.empty()) throw EmptyGroup("advantage normalization needs at least one reward");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  GroupAdvantages g;
  g.rewards.assign(rewards.begin(), rewards.end());
  g.epsilon = epsilon;
  g.advantages.assign(rewards.size(), 0.0);

  const double n = static_cast<double>(rewards.size());
  g.mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : rewards) ss += (r - g.mean) * (r - g.mean);
  g.std_dev = std::sqrt(ss / n);

  const bool constant = std::all_of(rewards.begin(), rewards.end(),
                                    [&](double r) { return r == rewards.front(); });
  if (constant) return g;
  // epsilon bounds the divisor from below instead of being added to it, so a
  // spread group comes out with exactly unit deviation.
  const double scale = std::max(g.std_dev, epsilon);
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    g.advantages[i] = (rewards[i] - g.mean) / scale;
  }
  return g;
}

}  // namespace docreward
