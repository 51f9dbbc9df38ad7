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
#include <string>
#include <string_view>
#include <vector>

namespace docreward {

enum class SegmentKind { Text, Heading, Table, Formula, Code };

enum class SourceMode { EleTagged, PlainBlocks };

enum class UnicodeForm { NFC, None };

std::string_view to_string(SegmentKind kind);
std::string_view to_string(SourceMode mode);
std::optional<SourceMode> parse_source_mode(std::string_view name);

struct NormalizationPolicy {
  UnicodeForm unicode_form = UnicodeForm::NFC;
  bool collapse_whitespace = true;
  // Drops `*`, `_` and backticks; `[text](url)` keeps only `text`.
  bool strip_inline_markup = false;
  bool lowercase = false;

  // Every option off: normalize_text is the identity.
  static NormalizationPolicy identity() {
    return {UnicodeForm::None, false, false, false};
  }

  bool operator==(const NormalizationPolicy&) const = default;
};

struct Segment {
  std::size_t index = 0;
  SegmentKind kind = SegmentKind::Text;
  std::string raw;
  std::string text;
};

struct Document {
  std::vector<Segment> segments;
  SourceMode source_mode = SourceMode::PlainBlocks;
  // Non-whitespace bytes found outside <ele> regions (tagged mode only).
  std::size_t discarded_bytes = 0;

  std::size_t size() const { return segments.size(); }
  bool empty() const { return segments.empty(); }
};

// Idempotent under any policy; with every option off the input is returned
// unchanged.
std::string normalize_text(std::string_view raw, const NormalizationPolicy& policy);

// Precedence when a block could be read several ways:
// Code > Table > Formula > Heading > Text.
SegmentKind classify_block(std::string_view raw);

// Tagged mode yields one segment per <ele>...</ele> region (the literal,
// case-sensitive ASCII tags) and throws MalformedTags on nesting, a stray
// close tag or an unclosed region. Plain mode splits on blank lines but keeps
// fenced code, pipe tables, <table> blocks and display math whole.
Document segment_markdown(std::string_view source, SourceMode mode,
                          const NormalizationPolicy& policy = {});

// Tagged when the source contains an <ele> tag, plain otherwise.
SourceMode detect_source_mode(std::string_view source);

}  // namespace docreward
