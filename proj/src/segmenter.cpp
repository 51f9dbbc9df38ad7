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

#include "docreward/segmenter.hpp"

#include <algorithm>
#include <cctype>

#include "docreward/error.hpp"
#include "docreward/unicode.hpp"
#include "text_util.hpp"

namespace docreward {

namespace {

constexpr std::string_view kOpenTag = "<ele>";
constexpr std::string_view kCloseTag = "</ele>";

struct Line {
  std::size_t begin;
  std::size_t end;  // exclusive, without the newline or a trailing '\r'
};

std::vector<Line> split_lines(std::string_view s) {
  std::vector<Line> lines;
  std::size_t begin = 0;
  while (begin <= s.size()) {
    std::size_t nl = s.find('\n', begin);
    std::size_t end = nl == std::string_view::npos ? s.size() : nl;
    std::size_t trimmed = end;
    if (trimmed > begin && s[trimmed - 1] == '\r') --trimmed;
    lines.push_back({begin, trimmed});
    if (nl == std::string_view::npos) break;
    begin = nl + 1;
  }
  return lines;
}

bool is_fence(std::string_view t) {
  return starts_with(t, "```") || starts_with(t, "~~~");
}

bool opens_multiline_math(std::string_view t) {
  if (starts_with(t, "$$")) return t.size() < 4 || !ends_with(t, "$$");
  if (starts_with(t, "\\[")) return !ends_with(t, "\\]") || t.size() < 4;
  return false;
}

bool opens_html_table(std::string_view t) {
  return starts_with(ascii_lower(t.substr(0, 6)), "<table");
}

std::size_t count_ci(std::string_view hay, std::string_view needle) {
  const std::string lower = ascii_lower(hay);
  std::size_t n = 0;
  for (std::size_t p = lower.find(needle); p != std::string::npos;
       p = lower.find(needle, p + needle.size())) {
    ++n;
  }
  return n;
}

// Blank-line splitting with atomic constructs. Returns [first, last] line
// index pairs.
std::vector<std::pair<std::size_t, std::size_t>> plain_blocks(std::string_view src,
                                                              const std::vector<Line>& lines) {
  auto text_of = [&](std::size_t i) {
    return trim(src.substr(lines[i].begin, lines[i].end - lines[i].begin));
  };
  auto blank = [&](std::size_t i) { return text_of(i).empty(); };
  const std::size_t n = lines.size();

  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  std::size_t i = 0;
  while (i < n) {
    if (blank(i)) {
      ++i;
      continue;
    }
    const std::size_t first = i;
    const std::string_view head = text_of(i);
    std::size_t last = i;

    if (is_fence(head)) {
      const char fence_char = head[0];
      const std::size_t fence_len = head.find_first_not_of(fence_char) == std::string_view::npos
                                        ? head.size()
                                        : head.find_first_not_of(fence_char);
      last = n - 1;
      for (std::size_t j = i + 1; j < n; ++j) {
        std::string_view t = text_of(j);
        if (t.size() >= fence_len && t.find_first_not_of(fence_char) == std::string_view::npos) {
          last = j;
          break;
        }
      }
    } else if (opens_multiline_math(head)) {
      const std::string_view close = starts_with(head, "$$") ? "$$" : "\\]";
      last = n - 1;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (text_of(j).find(close) != std::string_view::npos) {
          last = j;
          break;
        }
      }
    } else if (opens_html_table(head)) {
      long depth = 0;
      last = n - 1;
      for (std::size_t j = i; j < n; ++j) {
        std::string_view t = src.substr(lines[j].begin, lines[j].end - lines[j].begin);
        depth += static_cast<long>(count_ci(t, "<table"));
        depth -= static_cast<long>(count_ci(t, "</table"));
        if (depth <= 0) {
          last = j;
          break;
        }
      }
    } else {
      // Paragraph (or pipe table): runs to the next blank line, unless an
      // atomic construct starts first.
      std::size_t j = i + 1;
      while (j < n && !blank(j)) {
        std::string_view t = text_of(j);
        if (is_fence(t) || opens_multiline_math(t) || opens_html_table(t)) break;
        ++j;
      }
      last = j - 1;
      if (starts_with(head, "|")) {
        // Pipe tables absorb blank lines when more pipe rows follow.
        while (starts_with(text_of(last), "|")) {
          std::size_t k = last + 1;
          while (k < n && blank(k)) ++k;
          if (k == last + 1 || k >= n || !starts_with(text_of(k), "|")) break;
          std::size_t m = k + 1;
          while (m < n && !blank(m) && starts_with(text_of(m), "|")) ++m;
          last = m - 1;
        }
      }
    }
    blocks.emplace_back(first, last);
    i = last + 1;
  }
  return blocks;
}

// `[text](url)` -> `text`, `![alt](src)` -> `alt`; repeated until stable so
// nested links collapse fully.
std::string strip_links(std::string s) {
  for (;;) {
    bool changed = false;
    std::size_t close = s.find("](");
    while (close != std::string::npos) {
      std::size_t open = s.rfind('[', close);
      std::size_t end = s.find(')', close + 2);
      if (open != std::string::npos && end != std::string::npos &&
          s.find(']', open + 1) == close) {
        std::size_t from = (open > 0 && s[open - 1] == '!') ? open - 1 : open;
        std::string label = s.substr(open + 1, close - open - 1);
        s.replace(from, end + 1 - from, label);
        changed = true;
        close = s.find("](", from + label.size());
      } else {
        close = s.find("](", close + 2);
      }
    }
    if (!changed) return s;
  }
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char32_t cp : unicode::decode_utf8(s)) {
    if (unicode::is_white_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    unicode::append_utf8(out, cp);
  }
  return out;
}

}  // namespace

std::string_view to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::Text:
      return "text";
    case SegmentKind::Heading:
      return "heading";
    case SegmentKind::Table:
      return "table";
    case SegmentKind::Formula:
      return "formula";
    case SegmentKind::Code:
      return "code";
  }
  return "text";
}

std::string_view to_string(SourceMode mode) {
  return mode == SourceMode::EleTagged ? "ele_tagged" : "plain_blocks";
}

std::optional<SourceMode> parse_source_mode(std::string_view name) {
  if (name == "ele_tagged" || name == "ele") return SourceMode::EleTagged;
  if (name == "plain_blocks" || name == "plain") return SourceMode::PlainBlocks;
  return std::nullopt;
}

std::string normalize_text(std::string_view raw, const NormalizationPolicy& policy) {
  std::string s(raw);
  if (policy.strip_inline_markup) {
    std::erase_if(s, [](char c) { return c == '*' || c == '_' || c == '`'; });
    s = strip_links(std::move(s));
  }
  if (policy.lowercase) s = unicode::to_lower(s);
  if (policy.unicode_form == UnicodeForm::NFC) s = unicode::nfc(s);
  if (policy.collapse_whitespace) s = collapse_whitespace(s);
  return s;
}

SegmentKind classify_block(std::string_view raw) {
  const std::string_view t = trim(raw);
  if (is_fence(t)) return SegmentKind::Code;
  if (starts_with(t, "|") || opens_html_table(t)) return SegmentKind::Table;
  if ((starts_with(t, "$$") && ends_with(t, "$$") && t.size() >= 4) ||
      (starts_with(t, "\\[") && ends_with(t, "\\]") && t.size() >= 4)) {
    return SegmentKind::Formula;
  }
  std::size_t hashes = 0;
  while (hashes < t.size() && t[hashes] == '#') ++hashes;
  if (hashes >= 1 && hashes <= 6 && (hashes == t.size() || t[hashes] == ' ' || t[hashes] == '\t')) {
    return SegmentKind::Heading;
  }
  return SegmentKind::Text;
}

SourceMode detect_source_mode(std::string_view source) {
  return source.find(kOpenTag) != std::string_view::npos ||
                 source.find(kCloseTag) != std::string_view::npos
             ? SourceMode::EleTagged
             : SourceMode::PlainBlocks;
}

Document segment_markdown(std::string_view source, SourceMode mode,
                          const NormalizationPolicy& policy) {
  Document doc;
  doc.source_mode = mode;
  auto push = [&](std::string_view raw) {
    Segment seg;
    seg.index = doc.segments.size();
    seg.kind = classify_block(raw);
    seg.raw = std::string(raw);
    seg.text = normalize_text(raw, policy);
    doc.segments.push_back(std::move(seg));
  };
  auto count_discarded = [&](std::string_view outside) {
    doc.discarded_bytes += static_cast<std::size_t>(std::count_if(
        outside.begin(), outside.end(),
        [](char c) { return !std::isspace(static_cast<unsigned char>(c)); }));
  };

  if (mode == SourceMode::EleTagged) {
    std::size_t pos = 0;
    while (pos < source.size()) {
      const std::size_t open = source.find(kOpenTag, pos);
      const std::size_t stray_close = source.find(kCloseTag, pos);
      if (stray_close != std::string_view::npos &&
          (open == std::string_view::npos || stray_close < open)) {
        throw MalformedTags("closing </ele> without an open region at byte " +
                            std::to_string(stray_close));
      }
      if (open == std::string_view::npos) {
        count_discarded(source.substr(pos));
        break;
      }
      count_discarded(source.substr(pos, open - pos));
      const std::size_t body = open + kOpenTag.size();
      const std::size_t close = source.find(kCloseTag, body);
      if (close == std::string_view::npos) {
        throw MalformedTags("unclosed <ele> region at byte " + std::to_string(open));
      }
      const std::size_t nested = source.find(kOpenTag, body);
      if (nested != std::string_view::npos && nested < close) {
        throw MalformedTags("nested <ele> at byte " + std::to_string(nested));
      }
      push(source.substr(body, close - body));
      pos = close + kCloseTag.size();
    }
    return doc;
  }

  const auto lines = split_lines(source);
  for (const auto& [first, last] : plain_blocks(source, lines)) {
    push(source.substr(lines[first].begin, lines[last].end - lines[first].begin));
  }
  return doc;
}

}  // namespace docreward
