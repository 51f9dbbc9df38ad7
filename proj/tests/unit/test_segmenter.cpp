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

#include <fstream>
#include <sstream>

#include "docreward/error.hpp"
#include "docreward/segmenter.hpp"
#include "doctest.h"

using namespace docreward;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<SegmentKind> kinds(const Document& d) {
  std::vector<SegmentKind> out;
  for (const auto& s : d.segments) out.push_back(s.kind);
  return out;
}

}  // namespace

TEST_CASE("tagged source") {
  const auto d = segment_markdown("<ele>Alpha</ele>\n<ele>Beta</ele>", SourceMode::EleTagged);
  REQUIRE(d.size() == 2);
  CHECK(d.segments[0].text == "Alpha");
  CHECK(d.segments[1].text == "Beta");
  CHECK(kinds(d) == std::vector{SegmentKind::Text, SegmentKind::Text});
  CHECK(d.discarded_bytes == 0);
}

TEST_CASE("tagged source rejects bad nesting") {
  CHECK_THROWS_AS(segment_markdown("<ele>a", SourceMode::EleTagged), MalformedTags);
  CHECK_THROWS_AS(segment_markdown("a</ele>", SourceMode::EleTagged), MalformedTags);
  CHECK_THROWS_AS(segment_markdown("<ele><ele>a</ele></ele>", SourceMode::EleTagged),
                  MalformedTags);
}

TEST_CASE("tagged source counts text outside tags") {
  const auto d = segment_markdown("xy <ele>a</ele> z", SourceMode::EleTagged);
  CHECK(d.size() == 1);
  CHECK(d.discarded_bytes == 3);
}

TEST_CASE("plain blocks") {
  const auto d = segment_markdown("# Title\n\nBody para.", SourceMode::PlainBlocks);
  CHECK(kinds(d) == std::vector{SegmentKind::Heading, SegmentKind::Text});
}

TEST_CASE("six-block fixture matches the reference splitter") {
  const std::string dir = DOCREWARD_TEST_DATA;
  const auto d = segment_markdown(slurp(dir + "/six_blocks.md"), SourceMode::PlainBlocks);
  std::istringstream expected(slurp(dir + "/six_blocks.kinds"));
  std::vector<std::string> want;
  for (std::string line; std::getline(expected, line);) want.push_back(line);
  REQUIRE(d.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(to_string(d.segments[i].kind) == want[i]);
  CHECK(kinds(d) == std::vector{SegmentKind::Text, SegmentKind::Table, SegmentKind::Text,
                                SegmentKind::Formula, SegmentKind::Code, SegmentKind::Text});
}

TEST_CASE("normalize_text") {
  NormalizationPolicy p;
  CHECK(normalize_text("a  b\t c", p) == "a b c");
  CHECK(normalize_text("x", p) == "x");
  p.strip_inline_markup = true;
  CHECK(normalize_text("**bold** text", p) == "bold text");
  CHECK(normalize_text("see [the docs](http://x.org) now", p) == "see the docs now");
  p.lowercase = true;
  CHECK(normalize_text("ÀB", p) == "àb");
}

TEST_CASE("nfc composes decomposed input") {
  NormalizationPolicy p;
  CHECK(normalize_text("e\xCC\x81", p) == "\xC3\xA9");
  p.unicode_form = UnicodeForm::None;
  CHECK(normalize_text("e\xCC\x81", p) == "e\xCC\x81");
}

TEST_CASE("normalization is idempotent") {
  NormalizationPolicy p;
  p.strip_inline_markup = true;
  p.lowercase = true;
  for (const char* s : {"  **A**  b_c_ `d`  ", "[x](y) [[z](w)](v)", "Ｆｕｌｌ　width", "e\xCC\x81 \xE2\x80\x83 f"}) {
    const auto once = normalize_text(s, p);
    CHECK(normalize_text(once, p) == once);
  }
}

TEST_CASE("classify_block") {
  CHECK(classify_block("| a | b |\n|---|---|\n| 1 | 2 |") == SegmentKind::Table);
  CHECK(classify_block("$$E=mc^2$$") == SegmentKind::Formula);
  CHECK(classify_block("## Results") == SegmentKind::Heading);
  CHECK(classify_block("#hashtag") == SegmentKind::Text);
  CHECK(classify_block("```\ncode\n```") == SegmentKind::Code);
  CHECK(classify_block("<table><tr><td>1</td></tr></table>") == SegmentKind::Table);
  CHECK(classify_block("plain words") == SegmentKind::Text);
}

TEST_CASE("atomic blocks survive blank lines") {
  const auto d = segment_markdown("```\na\n\nb\n```\n\n$$\nx\n\ny\n$$", SourceMode::PlainBlocks);
  CHECK(kinds(d) == std::vector{SegmentKind::Code, SegmentKind::Formula});
}

TEST_CASE("mode detection and names") {
  CHECK(detect_source_mode("<ele>a</ele>") == SourceMode::EleTagged);
  CHECK(detect_source_mode("a\n\nb") == SourceMode::PlainBlocks);
  CHECK(parse_source_mode("ele_tagged") == SourceMode::EleTagged);
  CHECK(parse_source_mode("plain_blocks") == SourceMode::PlainBlocks);
  CHECK_FALSE(parse_source_mode("xml").has_value());
}

TEST_CASE("empty input gives an empty document") {
  CHECK(segment_markdown("", SourceMode::PlainBlocks).empty());
  CHECK(segment_markdown("\n\n  \n", SourceMode::PlainBlocks).empty());
  CHECK(segment_markdown("", SourceMode::EleTagged).empty());
}
