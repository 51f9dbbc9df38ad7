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

#include "docreward/text_distance.hpp"

#include <algorithm>
#include <array>
#include <vector>

#include "docreward/unicode.hpp"

namespace docreward {

namespace detail {

namespace {

// Cost of turning `col` into `row`; `row` indexes the DP vector.
std::uint64_t dp_core(std::u32string_view row, std::u32string_view col, std::uint64_t ins,
                      std::uint64_t del, std::uint64_t sub) {
  std::vector<std::uint64_t> d(row.size() + 1);
  for (std::size_t i = 0; i <= row.size(); ++i) d[i] = i * ins;
  for (std::size_t j = 1; j <= col.size(); ++j) {
    std::uint64_t diag = d[0];
    d[0] = j * del;
    for (std::size_t i = 1; i <= row.size(); ++i) {
      const std::uint64_t up = d[i];
      const std::uint64_t keep = diag + (row[i - 1] == col[j - 1] ? 0 : sub);
      d[i] = std::min({up + del, d[i - 1] + ins, keep});
      diag = up;
    }
  }
  return d[row.size()];
}

// Match vectors of the pattern, one 64-bit word per block of 64 positions.
class PatternMatchVectors {
 public:
  explicit PatternMatchVectors(std::u32string_view pattern)
      : words_((pattern.size() + 63) / 64), ascii_(256 * words_, 0) {
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      const char32_t c = pattern[i];
      const std::uint64_t bit = std::uint64_t{1} << (i % 64);
      if (c < 256) {
        ascii_[c * words_ + i / 64] |= bit;
      } else {
        slot_for(c)[i / 64] |= bit;
      }
    }
  }

  std::size_t words() const { return words_; }

  std::uint64_t get(std::size_t word, char32_t c) const {
    if (c < 256) return ascii_[c * words_ + word];
    auto it = std::lower_bound(keys_.begin(), keys_.end(), c);
    if (it == keys_.end() || *it != c) return 0;
    return other_[static_cast<std::size_t>(it - keys_.begin()) * words_ + word];
  }

 private:
  std::uint64_t* slot_for(char32_t c) {
    auto it = std::lower_bound(keys_.begin(), keys_.end(), c);
    const auto idx = static_cast<std::size_t>(it - keys_.begin());
    if (it == keys_.end() || *it != c) {
      keys_.insert(it, c);
      other_.insert(other_.begin() + static_cast<std::ptrdiff_t>(idx * words_), words_, 0);
    }
    return other_.data() + idx * words_;
  }

  std::size_t words_;
  std::vector<std::uint64_t> ascii_;
  std::vector<char32_t> keys_;
  std::vector<std::uint64_t> other_;
};

}  // namespace

std::uint64_t levenshtein_dp(std::u32string_view ref, std::u32string_view pred,
                             const EditCosts& costs) {
  // Reversing an edit script swaps the roles of insertion and removal.
  if (ref.size() <= pred.size()) {
    return dp_core(ref, pred, costs.insert, costs.remove, costs.substitute);
  }
  return dp_core(pred, ref, costs.remove, costs.insert, costs.substitute);
}

std::uint64_t levenshtein_bitparallel(std::u32string_view a, std::u32string_view b) {
  // Unit costs are symmetric; drop the shared prefix and suffix, then use the
  // shorter string as the pattern.
  while (!a.empty() && !b.empty() && a.front() == b.front()) {
    a.remove_prefix(1);
    b.remove_prefix(1);
  }
  while (!a.empty() && !b.empty() && a.back() == b.back()) {
    a.remove_suffix(1);
    b.remove_suffix(1);
  }
  if (a.size() > b.size()) std::swap(a, b);
  if (a.empty()) return b.size();

  const PatternMatchVectors pm(a);
  const std::size_t words = pm.words();
  const std::uint64_t last = std::uint64_t{1} << ((a.size() - 1) % 64);
  std::vector<std::uint64_t> vp(words, ~std::uint64_t{0});
  std::vector<std::uint64_t> vn(words, 0);
  std::uint64_t score = a.size();

  for (char32_t c : b) {
    std::uint64_t hp_carry = 1;
    std::uint64_t hn_carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t x = pm.get(w, c) | hn_carry;
      const std::uint64_t d0 = (((x & vp[w]) + vp[w]) ^ vp[w]) | x | vn[w];
      std::uint64_t hp = vn[w] | ~(d0 | vp[w]);
      std::uint64_t hn = d0 & vp[w];
      const std::uint64_t hp_in = hp_carry;
      const std::uint64_t hn_in = hn_carry;
      if (w + 1 < words) {
        hp_carry = hp >> 63;
        hn_carry = hn >> 63;
      } else {
        hp_carry = (hp & last) != 0;
        hn_carry = (hn & last) != 0;
      }
      hp = (hp << 1) | hp_in;
      hn = (hn << 1) | hn_in;
      vp[w] = hn | ~(d0 | hp);
      vn[w] = hp & d0;
    }
    score = score + hp_carry - hn_carry;
  }
  return score;
}

}  // namespace detail

std::uint64_t levenshtein(std::u32string_view ref, std::u32string_view pred,
                          const EditCosts& costs) {
  if (costs.is_unit()) return detail::levenshtein_bitparallel(ref, pred);
  return detail::levenshtein_dp(ref, pred, costs);
}

std::uint64_t levenshtein(std::string_view ref, std::string_view pred, const EditCosts& costs) {
  return levenshtein(unicode::decode_utf8(ref), unicode::decode_utf8(pred), costs);
}

DistanceResult measure_distance(std::u32string_view ref, std::u32string_view pred) {
  DistanceResult r;
  r.len_ref = ref.size();
  r.len_pred = pred.size();
  const std::size_t longest = std::max(r.len_ref, r.len_pred);
  if (longest == 0) return r;
  r.distance = detail::levenshtein_bitparallel(ref, pred);
  r.ned = static_cast<double>(r.distance) / static_cast<double>(longest);
  return r;
}

DistanceResult measure_distance(std::string_view ref, std::string_view pred) {
  return measure_distance(unicode::decode_utf8(ref), unicode::decode_utf8(pred));
}

double normalized_edit_distance(std::u32string_view a, std::u32string_view b) {
  return measure_distance(a, b).ned;
}

double normalized_edit_distance(std::string_view a, std::string_view b) {
  if (a == b) return 0.0;
  return measure_distance(a, b).ned;
}

double edit_similarity(std::u32string_view a, std::u32string_view b) {
  return 1.0 - normalized_edit_distance(a, b);
}

double edit_similarity(std::string_view a, std::string_view b) {
  return 1.0 - normalized_edit_distance(a, b);
}

}  // namespace docreward
