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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace docreward::synth {

enum class BlockKind { Text, Heading, Table, Formula, Image };

std::string_view to_string(BlockKind kind);
std::optional<BlockKind> parse_block_kind(std::string_view name);

struct ContentBlock {
  BlockKind kind = BlockKind::Text;
  std::string payload;  // source text, table markup, LaTeX, or image path
};

struct ContentSample {
  std::vector<ContentBlock> blocks;
  std::string source_tag;
};

struct Slot {
  std::string name;
  std::vector<BlockKind> accepts;
  int heading_level = 1;

  bool accepts_kind(BlockKind kind) const;
};

// Template file layout:
//
//   template: two_column_report
//   columns: 2
//   slot: title heading
//   slot: body_a text|formula
//   slot: figure image
//   slot: subtitle heading level=2
//   ---
//   <html> ... {{title}} ... {{body_a}} ... </html>
//
// Slot order is the reading order of the page. `{{style}}` is a reserved
// hole that receives seeded CSS.
struct LayoutTemplate {
  std::string template_id;
  int columns = 1;
  std::vector<Slot> slots;
  std::string html_skeleton;

  static LayoutTemplate parse(std::string_view text);  // throws UnrecognizedStructure

  // Every hole names exactly one slot and every slot has exactly one hole.
  void validate() const;
};

inline constexpr std::string_view kStyleHole = "style";

enum class RenderStatus { Pending, Rendered, Filtered };

std::string_view to_string(RenderStatus status);

struct FilledSlot {
  std::string slot;
  BlockKind kind = BlockKind::Text;
  std::string payload;
};

struct SynthPage {
  std::string page_id;
  std::string template_id;
  std::uint64_t seed = 0;
  std::string source_tag;
  std::vector<FilledSlot> blocks;  // slot order
  std::string html;
  std::string ground_truth_md;
  RenderStatus render_status = RenderStatus::Pending;
};

// Canonical Markdown for one block: ATX headings, whitespace-squeezed
// paragraphs, pipe tables (HTML when spans or nesting exist), `$$` fenced
// display math. Images carry no ground-truth text and map to "".
std::string block_markdown(BlockKind kind, std::string_view payload, int heading_level = 1);

// Fills slot i with sample block i. Throws SlotKindMismatch or
// InsufficientContent. Pure in (template, sample, seed).
SynthPage instantiate_template(const LayoutTemplate& layout, const ContentSample& sample,
                               std::uint64_t seed);

// Reads the block wrappers written by instantiate_template back in slot
// order. Throws UnrecognizedStructure for anything outside that grammar.
std::string extract_ground_truth(std::string_view html);

enum class ManifestFormat { Jsonl, Csv };

// Writes `<page_id>.html`, `<page_id>.md` and the manifest (sorted by
// page_id) under `output_dir`. `{html_path}` and `{png_path}` in the command
// template are replaced with paths relative to `output_dir`. Returns the
// manifest path; throws IoFailure.
std::filesystem::path build_manifest(const std::vector<SynthPage>& pages,
                                     std::string_view render_command_template,
                                     const std::filesystem::path& output_dir,
                                     ManifestFormat format = ManifestFormat::Jsonl);

std::string render_command(std::string_view command_template, std::string_view page_id);

// Runs each pending page's render command from `output_dir`; status moves to
// Rendered on exit code 0. Returns the number rendered.
std::size_t render_pages(std::vector<SynthPage>& pages, std::string_view render_command_template,
                         const std::filesystem::path& output_dir);

struct FilterRules {
  std::size_t max_text_chars_per_slot = 4000;
  std::size_t min_blocks = 1;
  std::size_t max_blocks = 64;
  bool require_nonempty_slots = true;
  // Image payloads must name existing files (relative paths resolve here).
  bool check_image_paths = true;
  std::filesystem::path image_root = ".";
};

struct FilterDecision {
  std::string page_id;
  bool retained = true;
  std::string reason;
};

struct FilterOutcome {
  std::vector<SynthPage> retained;
  std::vector<FilterDecision> log;  // one entry per input page, input order
};

// Structural quality rules; pixel-level checks belong after rendering.
FilterOutcome filter_pages(std::vector<SynthPage> pages, const FilterRules& rules);

struct ContentPool {
  std::map<BlockKind, std::vector<ContentBlock>> blocks;
  std::map<BlockKind, std::vector<std::string>> sources;  // parallel to blocks

  void add(ContentBlock block, std::string source);
  std::size_t count(BlockKind kind) const;
};

// *.txt paragraphs (a leading '#' makes a heading), *.tex formulas, *.table.md
// or *.table.html tables, and image files. Files are read in name order.
ContentPool load_content_pool(const std::filesystem::path& dir);

std::vector<LayoutTemplate> load_templates(const std::filesystem::path& dir);

// Page i uses a seed derived from (seed, i); templates and blocks are drawn
// from that seed. Output order follows i.
std::vector<SynthPage> generate_corpus(const std::vector<LayoutTemplate>& templates,
                                       const ContentPool& pool, std::size_t count,
                                       std::uint64_t seed, unsigned jobs = 1);

}  // namespace docreward::synth
