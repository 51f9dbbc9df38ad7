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

#include <string>
#include <string_view>

#include "docreward/reward.hpp"
#include "docreward/segmenter.hpp"
#include "json.hpp"

namespace docreward {

// Wire schemas shared by the CLI and the service. Field names are
// snake_case; doubles print with round-trip precision.

nlohmann::ordered_json to_json(const RewardBreakdown& b);
nlohmann::ordered_json to_json(const RewardConfig& c);
nlohmann::ordered_json to_json(const NormalizationPolicy& p);
nlohmann::ordered_json to_json(const Document& d);
nlohmann::ordered_json to_json(const GroupAdvantages& g);

// Applies the keys present in `overrides` on top of `base`. Throws
// SchemaError on unknown keys or wrong types.
RewardConfig apply_overrides(RewardConfig base, const nlohmann::json& overrides);
NormalizationPolicy apply_overrides(NormalizationPolicy base, const nlohmann::json& overrides);

std::string breakdown_json(const RewardBreakdown& b);

}  // namespace docreward
