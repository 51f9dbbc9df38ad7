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

#include "docreward/synth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "docreward/error.hpp"
#include "docreward/html.hpp"
#include "docreward/table_teds.hpp"
#include "docreward/unicode.hpp"
#include "json.hpp"
#include "text_util.hpp"

namespace docreward::synth {

namespace {

namespace fs = std::filesystem;

struct Hole {
  std::size_t begin;  // offset of "{{"
  std::size_t end;    // offset just past "}}"
  std::string name;
};

std::vector<Hole> find_holes(std::string_view skeleton) {
  std::vector<Hole> holes;
  std::size_t pos = 0;
  while ((pos = skeleton.find("{{", pos)) != std::string_view::npos) {
    const std::size_t close = skeleton.find("}}", pos + 2);
    if (close == std::string_view::npos) {
      throw UnrecognizedStructure("unterminated '{{' in template skeleton");
    }
    holes.push_back({pos, close + 2, std::string(trim(skeleton.substr(pos + 2, close - pos - 2)))});
    pos = close + 2;
  }
  return holes;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string seeded_style(std::uint64_t seed) {
  static constexpr std::array<std::string_view, 5> kFonts = {
      "Georgia, serif", "Helvetica, Arial, sans-serif", "'Times New Roman', serif",
      "Verdana, sans-serif", "'Noto Serif', serif"};
  std::mt19937_64 rng(seed);
  const auto font = kFonts[rng() % kFonts.size()];
  const auto size = 10 + rng() % 5;
  const auto line = 12 + rng() % 5;
  const auto gap = 12 + rng() % 21;
  const auto margin = 24 + rng() % 41;
  return fmt::format(
      "<style>body{{font-family:{};font-size:{}px;line-height:{}.{};margin:{}px}}"
      ".cols{{display:flex;gap:{}px}}.col{{flex:1}}table{{border-collapse:collapse}}"
      "td,th{{border:1px solid #444;padding:2px 4px}}</style>",
      font, size, line / 10, line % 10, margin, gap);
}

std::string strip_math_delimiters(std::string_view latex) {
  std::string_view t = trim(latex);
  if (starts_with(t, "$$") && ends_with(t, "$$") && t.size() >= 4) {
    t = t.substr(2, t.size() - 4);
  } else if (starts_with(t, "\\[") && ends_with(t, "\\]") && t.size() >= 4) {
    t = t.substr(2, t.size() - 4);
  }
  return squeeze_spaces(t);
}

bool pipe_representable(const TableTree& tree) {
  if (tree.root().children.empty()) return false;
  for (std::size_t tr : tree.root().children) {
    if (tree.nodes[tr].tag != "tr") return false;
    for (std::size_t c : tree.nodes[tr].children) {
      const TableNode& cell = tree.nodes[c];
      if (!cell.is_cell() || cell.colspan != 1 || cell.rowspan != 1 || !cell.children.empty()) {
        return false;
      }
    }
  }
  return true;
}

std::string pipe_cell(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::string table_markdown(const TableTree& tree) {
  if (!pipe_representable(tree)) return to_html(tree);
  std::size_t width = 0;
  for (std::size_t tr : tree.root().children) width = std::max(width, tree.nodes[tr].children.size());
  width = std::max<std::size_t>(width, 1);
  auto row = [&](std::size_t tr) {
    const auto& cells = tree.nodes[tr].children;
    std::string line = "|";
    for (std::size_t k = 0; k < width; ++k) {
      line += ' ';
      if (k < cells.size()) line += pipe_cell(tree.nodes[cells[k]].content);
      line += " |";
    }
    return line;
  };
  const auto& rows = tree.root().children;
  std::string out = row(rows.front());
  out += "\n|";
  for (std::size_t k = 0; k < width; ++k) out += " --- |";
  for (std::size_t r = 1; r < rows.size(); ++r) out += "\n" + row(rows[r]);
  return out;
}

std::string block_html(BlockKind kind, std::string_view payload, int heading_level) {
  switch (kind) {
    case BlockKind::Heading:
      return fmt::format("<h{0}>{1}</h{0}>", heading_level, html::escape(squeeze_spaces(payload)));
    case BlockKind::Text:
      return "<p>" + html::escape(squeeze_spaces(payload)) + "</p>";
    case BlockKind::Formula:
      return "<div class=\"math-display\">\\[" + html::escape(strip_math_delimiters(payload)) +
             "\\]</div>";
    case BlockKind::Table:
      return to_html(parse_table(payload));
    case BlockKind::Image:
      return "<figure><img src=\"" + html::escape(payload) + "\" alt=\"\"></figure>";
  }
  return {};
}

std::string text_between(const std::vector<html::Token>& tokens, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t k = from; k < to; ++k) {
    if (tokens[k].type == html::Token::Type::Text) out += html::decode_entities(tokens[k].text);
  }
  return out;
}

bool has_class(const html::Token& tok, std::string_view cls) {
  const auto value = tok.attribute("class");
  if (!value) return false;
  std::istringstream words(*value);
  std::string w;
  while (words >> w) {
    if (w == cls) return true;
  }
  return false;
}

// Index of the end tag closing the element opened at `open`, or tokens.size().
std::size_t matching_end(const std::vector<html::Token>& tokens, std::size_t open) {
  const std::string& name = tokens[open].name;
  int depth = 0;
  for (std::size_t k = open; k < tokens.size(); ++k) {
    const auto& t = tokens[k];
    if (t.name != name) continue;
    if (t.type == html::Token::Type::StartTag && !t.self_closing) ++depth;
    if (t.type == html::Token::Type::EndTag && --depth == 0) return k;
  }
  return tokens.size();
}

std::string block_from_tokens(std::string_view source, const std::vector<html::Token>& tokens,
                              std::size_t from, std::size_t to) {
  std::size_t k = from;
  while (k < to && tokens[k].type != html::Token::Type::StartTag) {
    if (tokens[k].type == html::Token::Type::Text && !trim(tokens[k].text).empty()) {
      throw UnrecognizedStructure("loose text inside a block wrapper");
    }
    ++k;
  }
  if (k == to) throw UnrecognizedStructure("empty block wrapper");
  const html::Token& head = tokens[k];
  const std::string& tag = head.name;
  if (tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6') {
    const std::size_t end = std::min(matching_end(tokens, k), to);
    return std::string(static_cast<std::size_t>(tag[1] - '0'), '#') + " " +
           squeeze_spaces(text_between(tokens, k + 1, end));
  }
  if (tag == "p") {
    const std::size_t end = std::min(matching_end(tokens, k), to);
    return squeeze_spaces(text_between(tokens, k + 1, end));
  }
  if (tag == "table") {
    const std::size_t stop = to < tokens.size() ? tokens[to].begin : source.size();
    return table_markdown(parse_table_html(source.substr(head.begin, stop - head.begin)));
  }
  if (tag == "div" && has_class(head, "math-display")) {
    const std::size_t end = std::min(matching_end(tokens, k), to);
    const std::string body(trim(text_between(tokens, k + 1, end)));
    if (!starts_with(body, "\\[") || !ends_with(body, "\\]") || body.size() < 4) {
      throw UnrecognizedStructure("display math without \\[ \\] delimiters");
    }
    return "$$\n" + strip_math_delimiters(body) + "\n$$";
  }
  if (tag == "figure") return {};
  throw UnrecognizedStructure("unsupported block element <" + tag + ">");
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoFailure("failed writing " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> blank_line_chunks(std::string_view text) {
  std::vector<std::string> chunks;
  std::string cur;
  std::size_t pos = 0;
  auto flush = [&] {
    const std::string_view t = trim(cur);
    if (!t.empty()) chunks.emplace_back(t);
    cur.clear();
  };
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, (nl == std::string_view::npos ? text.size() : nl) - pos);
    if (trim(line).empty()) {
      flush();
    } else {
      cur += line;
      cur += '\n';
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  flush();
  return chunks;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string_view to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::Text:
      return "text";
    case BlockKind::Heading:
      return "heading";
    case BlockKind::Table:
      return "table";
    case BlockKind::Formula:
      return "formula";
    case BlockKind::Image:
      return "image";
  }
  return "text";
}

std::optional<BlockKind> parse_block_kind(std::string_view name) {
  for (BlockKind k : {BlockKind::Text, BlockKind::Heading, BlockKind::Table, BlockKind::Formula,
                      BlockKind::Image}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(RenderStatus status) {
  switch (status) {
    case RenderStatus::Pending:
      return "pending";
    case RenderStatus::Rendered:
      return "rendered";
    case RenderStatus::Filtered:
      return "filtered";
  }
  return "pending";
}

bool Slot::accepts_kind(BlockKind kind) const {
  return std::find(accepts.begin(), accepts.end(), kind) != accepts.end();
}

LayoutTemplate LayoutTemplate::parse(std::string_view text) {
  LayoutTemplate t;
  std::size_t pos = 0;
  bool header_done = false;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t line_end = nl == std::string_view::npos ? text.size() : nl;
    const std::string_view line = trim(text.substr(pos, line_end - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (line == "---") {
      header_done = true;
      break;
    }
    if (line.empty() || starts_with(line, "#")) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw UnrecognizedStructure("template header line without ':': " + std::string(line));
    }
    const std::string_view key = trim(line.substr(0, colon));
    const std::string_view value = trim(line.substr(colon + 1));
    if (key == "template") {
      t.template_id = std::string(value);
    } else if (key == "columns") {
      if (value != "1" && value != "2" && value != "3") {
        throw UnrecognizedStructure("columns must be 1, 2 or 3");
      }
      t.columns = value[0] - '0';
    } else if (key == "slot") {
      std::istringstream fields{std::string(value)};
      Slot slot;
      std::string kinds, option;
      if (!(fields >> slot.name >> kinds)) {
        throw UnrecognizedStructure("slot line needs a name and kinds: " + std::string(line));
      }
      std::size_t start = 0;
      while (start <= kinds.size()) {
        const std::size_t bar = kinds.find('|', start);
        const std::string name =
            kinds.substr(start, (bar == std::string::npos ? kinds.size() : bar) - start);
        const auto kind = parse_block_kind(name);
        if (!kind) throw UnrecognizedStructure("unknown slot kind '" + name + "'");
        slot.accepts.push_back(*kind);
        if (bar == std::string::npos) break;
        start = bar + 1;
      }
      while (fields >> option) {
        if (starts_with(option, "level=") && option.size() == 7 && option[6] >= '1' &&
            option[6] <= '6') {
          slot.heading_level = option[6] - '0';
        } else {
          throw UnrecognizedStructure("unknown slot option '" + option + "'");
        }
      }
      t.slots.push_back(std::move(slot));
    } else {
      throw UnrecognizedStructure("unknown template header key '" + std::string(key) + "'");
    }
  }
  if (!header_done) throw UnrecognizedStructure("template is missing the '---' separator");
  t.html_skeleton = std::string(text.substr(pos));
  t.validate();
  return t;
}

void LayoutTemplate::validate() const {
  if (template_id.empty()) throw UnrecognizedStructure("template id is empty");
  if (slots.empty()) throw UnrecognizedStructure("template " + template_id + " has no slots");
  std::map<std::string, int> uses;
  for (const auto& s : slots) {
    if (s.name == kStyleHole) throw UnrecognizedStructure("slot name 'style' is reserved");
    if (!uses.emplace(s.name, 0).second) {
      throw UnrecognizedStructure("duplicate slot '" + s.name + "' in " + template_id);
    }
  }
  for (const auto& hole : find_holes(html_skeleton)) {
    if (hole.name == kStyleHole) continue;
    auto it = uses.find(hole.name);
    if (it == uses.end()) {
      throw UnrecognizedStructure("hole '" + hole.name + "' has no slot in " + template_id);
    }
    ++it->second;
  }
  for (const auto& [name, count] : uses) {
    if (count != 1) {
      throw UnrecognizedStructure("slot '" + name + "' must appear exactly once in " +
                                  template_id);
    }
  }
}

std::string block_markdown(BlockKind kind, std::string_view payload, int heading_level) {
  switch (kind) {
    case BlockKind::Heading:
      return std::string(static_cast<std::size_t>(heading_level), '#') + " " +
             squeeze_spaces(payload);
    case BlockKind::Text:
      return squeeze_spaces(payload);
    case BlockKind::Formula:
      return "$$\n" + strip_math_delimiters(payload) + "\n$$";
    case BlockKind::Table:
      return table_markdown(parse_table(payload));
    case BlockKind::Image:
      return {};
  }
  return {};
}

SynthPage instantiate_template(const LayoutTemplate& layout, const ContentSample& sample,
                               std::uint64_t seed) {
  if (sample.blocks.size() < layout.slots.size()) {
    throw InsufficientContent(fmt::format("template {} has {} slots but the sample has {} blocks",
                                          layout.template_id, layout.slots.size(),
                                          sample.blocks.size()));
  }
  SynthPage page;
  page.template_id = layout.template_id;
  page.seed = seed;
  page.page_id = fmt::format("{}-{:016x}", layout.template_id, seed);
  page.source_tag = sample.source_tag;

  std::map<std::string, std::string> fills;
  std::vector<std::string> markdown;
  for (std::size_t i = 0; i < layout.slots.size(); ++i) {
    const Slot& slot = layout.slots[i];
    const ContentBlock& block = sample.blocks[i];
    if (!slot.accepts_kind(block.kind)) {
      throw SlotKindMismatch(fmt::format("slot '{}' of {} does not accept {} content", slot.name,
                                         layout.template_id, to_string(block.kind)));
    }
    page.blocks.push_back({slot.name, block.kind, block.payload});
    fills[slot.name] =
        fmt::format("<div class=\"blk\" data-order=\"{}\" data-slot=\"{}\">{}</div>", i,
                    html::escape(slot.name), block_html(block.kind, block.payload, slot.heading_level));
    std::string md = block_markdown(block.kind, block.payload, slot.heading_level);
    if (!md.empty()) markdown.push_back(std::move(md));
  }

  const std::string& skeleton = layout.html_skeleton;
  std::size_t copied = 0;
  for (const auto& hole : find_holes(skeleton)) {
    page.html.append(skeleton, copied, hole.begin - copied);
    page.html += hole.name == kStyleHole ? seeded_style(seed) : fills.at(hole.name);
    copied = hole.end;
  }
  page.html.append(skeleton, copied);

  for (std::size_t i = 0; i < markdown.size(); ++i) {
    if (i) page.ground_truth_md += "\n\n";
    page.ground_truth_md += markdown[i];
  }
  return page;
}

std::string extract_ground_truth(std::string_view source) {
  const auto tokens = html::tokenize(source);
  std::map<long, std::string> blocks;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    const auto& t = tokens[k];
    if (t.type != html::Token::Type::StartTag || t.name != "div" || !has_class(t, "blk")) continue;
    const auto order = t.attribute("data-order");
    long index = -1;
    try {
      std::size_t used = 0;
      if (order) index = std::stol(*order, &used);
      if (!order || used != order->size() || index < 0) index = -1;
    } catch (const std::exception&) {
      index = -1;
    }
    if (index < 0) throw UnrecognizedStructure("block wrapper without a valid data-order");
    const std::size_t end = matching_end(tokens, k);
    if (end == tokens.size()) throw UnrecognizedStructure("unclosed block wrapper");
    for (std::size_t m = k + 1; m < end; ++m) {
      if (tokens[m].type == html::Token::Type::StartTag && has_class(tokens[m], "blk")) {
        throw UnrecognizedStructure("nested block wrapper");
      }
    }
    if (!blocks.emplace(index, block_from_tokens(source, tokens, k + 1, end)).second) {
      throw UnrecognizedStructure("duplicate data-order " + std::to_string(index));
    }
    k = end;
  }
  std::string out;
  for (const auto& [index, md] : blocks) {
    if (md.empty()) continue;
    if (!out.empty()) out += "\n\n";
    out += md;
  }
  return out;
}

std::string render_command(std::string_view command_template, std::string_view page_id) {
  std::string out(command_template);
  const std::string html_path = std::string(page_id) + ".html";
  const std::string png_path = std::string(page_id) + ".png";
  for (const auto& [key, value] :
       {std::pair<std::string_view, std::string_view>{"{html_path}", html_path},
        {"{png_path}", png_path}}) {
    std::size_t pos = 0;
    while ((pos = out.find(key, pos)) != std::string::npos) {
      out.replace(pos, key.size(), value);
      pos += value.size();
    }
  }
  return out;
}

fs::path build_manifest(const std::vector<SynthPage>& pages, std::string_view render_command_template,
                        const fs::path& output_dir, ManifestFormat format) {
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) throw IoFailure("cannot create " + output_dir.string() + ": " + ec.message());

  std::vector<const SynthPage*> sorted;
  for (const auto& p : pages) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(),
            [](const SynthPage* a, const SynthPage* b) { return a->page_id < b->page_id; });

  std::string manifest;
  if (format == ManifestFormat::Csv) manifest = "page_id,html_path,gt_md_path,render_cmd,status\n";
  for (const SynthPage* p : sorted) {
    const std::string html_path = p->page_id + ".html";
    const std::string md_path = p->page_id + ".md";
    write_file(output_dir / html_path, p->html);
    write_file(output_dir / md_path, p->ground_truth_md);
    const std::string cmd = render_command(render_command_template, p->page_id);
    if (format == ManifestFormat::Jsonl) {
      nlohmann::ordered_json line;
      line["page_id"] = p->page_id;
      line["html_path"] = html_path;
      line["gt_md_path"] = md_path;
      line["render_cmd"] = cmd;
      line["status"] = to_string(p->render_status);
      manifest += line.dump() + "\n";
    } else {
      manifest += fmt::format("{},{},{},{},{}\n", csv_field(p->page_id), csv_field(html_path),
                              csv_field(md_path), csv_field(cmd), to_string(p->render_status));
    }
  }
  const fs::path path =
      output_dir / (format == ManifestFormat::Jsonl ? "manifest.jsonl" : "manifest.csv");
  write_file(path, manifest);
  return path;
}

std::size_t render_pages(std::vector<SynthPage>& pages, std::string_view render_command_template,
                         const fs::path& output_dir) {
  std::size_t rendered = 0;
  for (auto& p : pages) {
    if (p.render_status != RenderStatus::Pending) continue;
    const std::string cmd = "cd '" + output_dir.string() + "' && " +
                            render_command(render_command_template, p.page_id);
    if (std::system(cmd.c_str()) == 0) {
      p.render_status = RenderStatus::Rendered;
      ++rendered;
    }
  }
  return rendered;
}

FilterOutcome filter_pages(std::vector<SynthPage> pages, const FilterRules& rules) {
  FilterOutcome outcome;
  for (auto& page : pages) {
    std::string reason;
    if (page.blocks.size() < rules.min_blocks) {
      reason = fmt::format("{} blocks < min {}", page.blocks.size(), rules.min_blocks);
    } else if (page.blocks.size() > rules.max_blocks) {
      reason = fmt::format("{} blocks > max {}", page.blocks.size(), rules.max_blocks);
    }
    for (const auto& b : page.blocks) {
      if (!reason.empty()) break;
      if (rules.require_nonempty_slots && trim(b.payload).empty()) {
        reason = "empty slot '" + b.slot + "'";
      } else if ((b.kind == BlockKind::Text || b.kind == BlockKind::Heading) &&
                 unicode::length(b.payload) > rules.max_text_chars_per_slot) {
        reason = fmt::format("slot '{}' longer than {} characters", b.slot,
                             rules.max_text_chars_per_slot);
      } else if (b.kind == BlockKind::Image && rules.check_image_paths) {
        fs::path img(b.payload);
        if (img.is_relative()) img = rules.image_root / img;
        std::error_code ec;
        if (!fs::is_regular_file(img, ec)) reason = "missing image '" + b.payload + "'";
      }
    }
    outcome.log.push_back({page.page_id, reason.empty(), reason});
    if (reason.empty()) {
      outcome.retained.push_back(std::move(page));
    } else {
      page.render_status = RenderStatus::Filtered;
    }
  }
  return outcome;
}

void ContentPool::add(ContentBlock block, std::string source) {
  const BlockKind kind = block.kind;
  blocks[kind].push_back(std::move(block));
  sources[kind].push_back(std::move(source));
}

std::size_t ContentPool::count(BlockKind kind) const {
  const auto it = blocks.find(kind);
  return it == blocks.end() ? 0 : it->second.size();
}

ContentPool load_content_pool(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoFailure("content directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  static const std::set<std::string> kImageExt = {".png", ".jpg", ".jpeg", ".gif", ".svg", ".webp"};
  ContentPool pool;
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    const std::string ext = ascii_lower(path.extension().string());
    if (kImageExt.count(ext)) {
      pool.add({BlockKind::Image, fs::absolute(path).lexically_normal().string()}, name);
    } else if (ends_with(name, ".table.html")) {
      pool.add({BlockKind::Table, read_file(path)}, name);
    } else if (ends_with(name, ".table.md")) {
      for (auto& chunk : blank_line_chunks(read_file(path))) {
        pool.add({BlockKind::Table, std::move(chunk)}, name);
      }
    } else if (ext == ".tex") {
      for (auto& chunk : blank_line_chunks(read_file(path))) {
        pool.add({BlockKind::Formula, std::move(chunk)}, name);
      }
    } else if (ext == ".txt" || ext == ".md") {
      for (auto& chunk : blank_line_chunks(read_file(path))) {
        if (starts_with(chunk, "#")) {
          const std::size_t body = chunk.find_first_not_of('#');
          pool.add({BlockKind::Heading,
                    std::string(trim(std::string_view(chunk).substr(
                        body == std::string::npos ? chunk.size() : body)))},
                   name);
        } else {
          pool.add({BlockKind::Text, std::move(chunk)}, name);
        }
      }
    }
  }
  return pool;
}

std::vector<LayoutTemplate> load_templates(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoFailure("template directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".tmpl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<LayoutTemplate> out;
  for (const auto& f : files) out.push_back(LayoutTemplate::parse(read_file(f)));
  if (out.empty()) throw IoFailure("no *.tmpl files in " + dir.string());
  return out;
}

std::vector<SynthPage> generate_corpus(const std::vector<LayoutTemplate>& templates,
                                       const ContentPool& pool, std::size_t count,
                                       std::uint64_t seed, unsigned jobs) {
  if (templates.empty()) throw InsufficientContent("no templates to instantiate");
  auto make_page = [&](std::size_t i) {
    const std::uint64_t page_seed = splitmix64(seed + i);
    std::mt19937_64 rng(page_seed);
    const LayoutTemplate& layout = templates[rng() % templates.size()];
    ContentSample sample;
    std::vector<std::string> tags;
    for (const Slot& slot : layout.slots) {
      std::vector<BlockKind> available;
      for (BlockKind k : slot.accepts) {
        if (pool.count(k) > 0) available.push_back(k);
      }
      if (available.empty()) {
        throw InsufficientContent("no content for slot '" + slot.name + "' of " +
                                  layout.template_id);
      }
      const BlockKind kind = available[rng() % available.size()];
      const std::size_t idx = rng() % pool.count(kind);
      sample.blocks.push_back(pool.blocks.at(kind)[idx]);
      const std::string& tag = pool.sources.at(kind)[idx];
      if (std::find(tags.begin(), tags.end(), tag) == tags.end()) tags.push_back(tag);
    }
    for (std::size_t t = 0; t < tags.size(); ++t) {
      if (t) sample.source_tag += ',';
      sample.source_tag += tags[t];
    }
    return instantiate_template(layout, sample, page_seed);
  };

  std::vector<SynthPage> pages(count);
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) pages[i] = make_page(i);
    return pages;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool_threads;
  for (unsigned w = 0; w < workers; ++w) {
    pool_threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          pages[i] = make_page(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool_threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return pages;
}

}  // namespace docreward::synth
