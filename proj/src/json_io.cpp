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

#include "docreward/json_io.hpp"

#include <stdexcept>

#include "docreward/error.hpp"

namespace docreward {

namespace {

double number_field(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number()) throw SchemaError("'" + key + "' must be a number");
  return j.get<double>();
}

bool bool_field(const nlohmann::json& j, const std::string& key) {
  if (!j.is_boolean()) throw SchemaError("'" + key + "' must be a boolean");
  return j.get<bool>();
}

}  // namespace

nlohmann::ordered_json to_json(const RewardBreakdown& b) {
  nlohmann::ordered_json j;
  j["r_dist"] = b.r_dist;
  j["r_count"] = b.r_count;
  j["r_order"] = b.r_order;
  j["total"] = b.total;
  j["n_ref"] = b.n_ref;
  j["n_pred"] = b.n_pred;
  j["n_matched"] = b.n_matched;
  j["inversions"] = b.inversions;
  j["used_fallback"] = b.used_fallback;
  return j;
}

nlohmann::ordered_json to_json(const RewardConfig& c) {
  nlohmann::ordered_json j;
  j["w_dist"] = c.w_dist;
  j["w_count"] = c.w_count;
  j["w_order"] = c.w_order;
  j["clamp_count_at_zero"] = c.clamp_count_at_zero;
  j["order_denominator"] = to_string(c.order_denominator);
  j["min_similarity"] = c.min_similarity ? nlohmann::ordered_json(*c.min_similarity) : nullptr;
  j["fallback_to_plain"] = c.fallback_to_plain;
  return j;
}

nlohmann::ordered_json to_json(const NormalizationPolicy& p) {
  nlohmann::ordered_json j;
  j["unicode_form"] = p.unicode_form == UnicodeForm::NFC ? "nfc" : "none";
  j["collapse_whitespace"] = p.collapse_whitespace;
  j["strip_inline_markup"] = p.strip_inline_markup;
  j["lowercase"] = p.lowercase;
  return j;
}

nlohmann::ordered_json to_json(const Document& d) {
  nlohmann::ordered_json j;
  j["source_mode"] = to_string(d.source_mode);
  j["discarded_bytes"] = d.discarded_bytes;
  auto segments = nlohmann::ordered_json::array();
  for (const auto& s : d.segments) {
    nlohmann::ordered_json seg;
    seg["index"] = s.index;
    seg["kind"] = to_string(s.kind);
    seg["raw"] = s.raw;
    seg["text"] = s.text;
    segments.push_back(std::move(seg));
  }
  j["segments"] = std::move(segments);
  return j;
}

nlohmann::ordered_json to_json(const GroupAdvantages& g) {
  nlohmann::ordered_json j;
  j["rewards"] = g.rewards;
  j["advantages"] = g.advantages;
  j["mean"] = g.mean;
  j["std"] = g.std_dev;
  j["epsilon"] = g.epsilon;
  return j;
}

RewardConfig apply_overrides(RewardConfig c, const nlohmann::json& o) {
  if (o.is_null()) return c;
  if (!o.is_object()) throw SchemaError("reward config must be an object");
  for (const auto& [key, value] : o.items()) {
    if (key == "w_dist") {
      c.w_dist = number_field(value, key);
    } else if (key == "w_count") {
      c.w_count = number_field(value, key);
    } else if (key == "w_order") {
      c.w_order = number_field(value, key);
    } else if (key == "clamp_count_at_zero") {
      c.clamp_count_at_zero = bool_field(value, key);
    } else if (key == "fallback_to_plain") {
      c.fallback_to_plain = bool_field(value, key);
    } else if (key == "order_denominator") {
      const auto d = value.is_string() ? parse_order_denominator(value.get<std::string>())
                                       : std::nullopt;
      if (!d) throw SchemaError("'order_denominator' must be reference_pairs or matched_pairs");
      c.order_denominator = *d;
    } else if (key == "min_similarity") {
      if (value.is_null()) {
        c.min_similarity.reset();
      } else {
        c.min_similarity = number_field(value, key);
      }
    } else {
      throw SchemaError("unknown reward config key '" + key + "'");
    }
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  return c;
}

NormalizationPolicy apply_overrides(NormalizationPolicy p, const nlohmann::json& o) {
  if (o.is_null()) return p;
  if (!o.is_object()) throw SchemaError("normalization policy must be an object");
  for (const auto& [key, value] : o.items()) {
    if (key == "unicode_form") {
      const std::string form = value.is_string() ? value.get<std::string>() : "";
      if (form == "nfc") {
        p.unicode_form = UnicodeForm::NFC;
      } else if (form == "none") {
        p.unicode_form = UnicodeForm::None;
      } else {
        throw SchemaError("'unicode_form' must be nfc or none");
      }
    } else if (key == "collapse_whitespace") {
      p.collapse_whitespace = bool_field(value, key);
    } else if (key == "strip_inline_markup") {
      p.strip_inline_markup = bool_field(value, key);
    } else if (key == "lowercase") {
      p.lowercase = bool_field(value, key);
    } else {
      throw SchemaError("unknown normalization key '" + key + "'");
    }
  }
  return p;
}

std::string breakdown_json(const RewardBreakdown& b) { return to_json(b).dump(); }

}  // namespace docreward
