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

#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "docreward/error.hpp"
#include "docreward/eval_harness.hpp"
#include "docreward/json_io.hpp"
#include "docreward/reward.hpp"
#include "docreward/segmenter.hpp"
#include "docreward/service.hpp"
#include "docreward/synth.hpp"

namespace docreward::cli {

namespace {

constexpr std::size_t kEvalChunk = 256;

struct PolicyFlags {
  std::string unicode_form;
  bool no_collapse = false;
  bool strip_markup = false;
  bool lowercase = false;

  void attach(CLI::App* app) {
    app->add_option("--unicode-form", unicode_form, "nfc or none")
        ->check(CLI::IsMember({"nfc", "none"}));
    app->add_flag("--no-collapse-whitespace", no_collapse, "keep whitespace runs");
    app->add_flag("--strip-markup", strip_markup, "drop emphasis and link markup");
    app->add_flag("--lowercase", lowercase, "case-fold before comparing");
  }

  NormalizationPolicy apply(NormalizationPolicy p) const {
    if (!unicode_form.empty()) {
      p.unicode_form = unicode_form == "nfc" ? UnicodeForm::NFC : UnicodeForm::None;
    }
    if (no_collapse) p.collapse_whitespace = false;
    if (strip_markup) p.strip_inline_markup = true;
    if (lowercase) p.lowercase = true;
    return p;
  }
};

std::optional<SourceMode> mode_flag(const std::string& name) {
  if (name == "auto") return std::nullopt;
  return parse_source_mode(name);
}

std::string read_input(const std::string& path, std::istream& in) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoFailure("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoFailure("cannot write " + path);
  f << text;
  if (!f) throw IoFailure("write failed for " + path);
}

// Scores are kept per record; texts are dropped as soon as a chunk is scored.
EvalReport evaluate_stream(std::istream& in, const std::string& group_by,
                           const EvalOptions& options, unsigned jobs) {
  std::vector<DocScore> scores;
  std::vector<EvalRecord> kept;
  std::set<std::string> ids;
  std::vector<EvalRecord> chunk;
  auto flush = [&] {
    auto part = evaluate_all(chunk, options, jobs);
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      scores.push_back(std::move(part[i]));
      EvalRecord meta;
      meta.doc_id = std::move(chunk[i].doc_id);
      meta.attributes = std::move(chunk[i].attributes);
      kept.push_back(std::move(meta));
    }
    chunk.clear();
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    EvalRecord record;
    try {
      record = parse_eval_record(line);
    } catch (const SchemaError& e) {
      throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!ids.insert(record.doc_id).second) {
      throw SchemaError("line " + std::to_string(line_no) + ": duplicate doc_id '" +
                        record.doc_id + "'");
    }
    chunk.push_back(std::move(record));
    if (chunk.size() >= kEvalChunk) flush();
  }
  if (!chunk.empty()) flush();
  return aggregate(scores, kept, group_by);
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Layout-aware reward and evaluation engine for document parsing", "docreward"};
  app.set_version_flag("--version", std::string(service::kVersion));
  app.require_subcommand(1);

  // segment
  auto* seg = app.add_subcommand("segment", "print the segmented document as JSON");
  std::string seg_input = "-";
  std::string seg_mode = "auto";
  PolicyFlags seg_policy;
  seg->add_option("input", seg_input, "markdown file, or - for stdin");
  seg->add_option("--mode", seg_mode, "auto, ele_tagged or plain_blocks")
      ->check(CLI::IsMember({"auto", "ele_tagged", "plain_blocks"}));
  seg_policy.attach(seg);

  // reward
  auto* rew = app.add_subcommand("reward", "score a prediction against a reference");
  std::string pred_path, ref_path, rew_mode = "auto", rew_config, order_denominator;
  std::optional<double> w_dist, w_count, w_order, min_similarity;
  bool no_clamp = false, fallback = false;
  PolicyFlags rew_policy;
  rew->add_option("--pred", pred_path, "prediction markdown, or -")->required();
  rew->add_option("--ref", ref_path, "reference markdown, or -")->required();
  rew->add_option("--mode", rew_mode, "auto, ele_tagged or plain_blocks")
      ->check(CLI::IsMember({"auto", "ele_tagged", "plain_blocks"}));
  rew->add_option("--config", rew_config, "service config JSON supplying defaults");
  rew->add_option("--w-dist", w_dist);
  rew->add_option("--w-count", w_count);
  rew->add_option("--w-order", w_order);
  rew->add_option("--min-similarity", min_similarity);
  rew->add_option("--order-denominator", order_denominator)
      ->check(CLI::IsMember({"reference_pairs", "matched_pairs"}));
  rew->add_flag("--no-clamp", no_clamp, "let the count reward go negative");
  rew->add_flag("--fallback-to-plain", fallback, "re-segment malformed predictions");
  rew_policy.attach(rew);

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "score a JSONL dataset and emit a report");
  std::string dataset, group_by, format = "json", ev_out;
  unsigned ev_jobs = 1;
  bool no_fallback = false;
  PolicyFlags ev_policy;
  ev->add_option("--dataset", dataset, "JSONL records, or -")->required();
  ev->add_option("--group-by", group_by, "attribute key to group by");
  ev->add_option("--format", format, "json, csv or md");
  ev->add_option("--out", ev_out, "output path (default stdout)");
  ev->add_option("--jobs", ev_jobs)->check(CLI::PositiveNumber);
  ev->add_flag("--no-fallback", no_fallback, "fail on malformed tagged predictions");
  ev_policy.attach(ev);

  // synth
  auto* syn = app.add_subcommand("synth", "generate synthetic pages and a manifest");
  std::string tmpl_dir, content_dir, synth_out, render_cmd, manifest_format = "jsonl";
  std::size_t n_pages = 0;
  std::uint64_t seed = 0;
  unsigned syn_jobs = 1;
  bool no_filter = false;
  syn->add_option("--templates", tmpl_dir)->required()->check(CLI::ExistingDirectory);
  syn->add_option("--content", content_dir)->required()->check(CLI::ExistingDirectory);
  syn->add_option("--n", n_pages)->required();
  syn->add_option("--seed", seed);
  syn->add_option("--out", synth_out)->required();
  syn->add_option("--jobs", syn_jobs)->check(CLI::PositiveNumber);
  syn->add_option("--render-cmd", render_cmd, "command template with {html_path} {png_path}");
  syn->add_option("--manifest-format", manifest_format)
      ->check(CLI::IsMember({"jsonl", "csv"}));
  syn->add_flag("--no-filter", no_filter, "keep every generated page");

  // serve
  auto* srv = app.add_subcommand("serve", "run the HTTP reward service");
  std::string srv_config, host;
  std::optional<int> port;
  srv->add_option("--config", srv_config, "service config JSON");
  srv->add_option("--host", host);
  srv->add_option("--port", port)->check(CLI::Range(0, 65535));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << service::kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return 1;
  }

  try {
    if (seg->parsed()) {
      const std::string source = read_input(seg_input, in);
      const auto mode = mode_flag(seg_mode).value_or(detect_source_mode(source));
      const Document doc = segment_markdown(source, mode, seg_policy.apply({}));
      out << to_json(doc).dump() << "\n";
      return 0;
    }
    if (rew->parsed()) {
      if (pred_path == "-" && ref_path == "-") {
        throw SchemaError("--pred and --ref cannot both read stdin");
      }
      service::ServiceConfig base;
      if (!rew_config.empty()) base = service::ServiceConfig::load(rew_config);
      RewardConfig cfg = base.reward;
      if (w_dist) cfg.w_dist = *w_dist;
      if (w_count) cfg.w_count = *w_count;
      if (w_order) cfg.w_order = *w_order;
      if (min_similarity) cfg.min_similarity = *min_similarity;
      if (!order_denominator.empty()) cfg.order_denominator = *parse_order_denominator(order_denominator);
      if (no_clamp) cfg.clamp_count_at_zero = false;
      if (fallback) cfg.fallback_to_plain = true;
      try {
        cfg.validate();
      } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
      }
      const NormalizationPolicy policy = rew_policy.apply(base.policy);
      const std::string pred = read_input(pred_path, in);
      const std::string ref = read_input(ref_path, in);
      std::optional<SourceMode> mode = base.mode;
      if (rew_mode != "auto") mode = mode_flag(rew_mode);
      const SourceMode effective = mode.value_or(detect_source_mode(ref));
      out << breakdown_json(multi_aspect_reward(pred, ref, cfg, policy, effective)) << "\n";
      return 0;
    }
    if (ev->parsed()) {
      const ReportFormat fmt = parse_report_format(format);
      EvalOptions options;
      options.policy = ev_policy.apply({});
      options.fallback_to_plain = !no_fallback;
      EvalReport report;
      if (dataset == "-") {
        report = evaluate_stream(in, group_by, options, ev_jobs);
      } else {
        std::ifstream f(dataset, std::ios::binary);
        if (!f) throw IoFailure("cannot read " + dataset);
        report = evaluate_stream(f, group_by, options, ev_jobs);
      }
      write_output(ev_out, emit_report(report, fmt), out);
      return 0;
    }
    if (syn->parsed()) {
      const auto templates = synth::load_templates(tmpl_dir);
      const auto pool = synth::load_content_pool(content_dir);
      auto pages = synth::generate_corpus(templates, pool, n_pages, seed, syn_jobs);
      const std::size_t generated = pages.size();
      std::size_t filtered = 0;
      if (!no_filter) {
        synth::FilterRules rules;
        rules.image_root = content_dir;
        auto outcome = synth::filter_pages(std::move(pages), rules);
        for (const auto& d : outcome.log) {
          if (!d.retained) {
            ++filtered;
            err << "filtered " << d.page_id << ": " << d.reason << "\n";
          }
        }
        pages = std::move(outcome.retained);
      }
      std::filesystem::create_directories(synth_out);
      const auto manifest = synth::build_manifest(
          pages, render_cmd, synth_out,
          manifest_format == "csv" ? synth::ManifestFormat::Csv : synth::ManifestFormat::Jsonl);
      std::size_t rendered = 0;
      if (!render_cmd.empty()) {
        rendered = synth::render_pages(pages, render_cmd, synth_out);
        synth::build_manifest(
            pages, render_cmd, synth_out,
            manifest_format == "csv" ? synth::ManifestFormat::Csv : synth::ManifestFormat::Jsonl);
      }
      nlohmann::ordered_json summary;
      summary["generated"] = generated;
      summary["filtered"] = filtered;
      summary["written"] = pages.size();
      summary["rendered"] = rendered;
      summary["manifest"] = manifest.string();
      out << summary.dump() << "\n";
      return 0;
    }
    if (srv->parsed()) {
      service::ServiceConfig config;
      if (!srv_config.empty()) config = service::ServiceConfig::load(srv_config);
      if (!host.empty()) config.host = host;
      if (port) config.port = *port;
      return service::serve(config);
    }
  } catch (const docreward::Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace docreward::cli
