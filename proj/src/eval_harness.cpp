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

#include "docreward/eval_harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "docreward/error.hpp"
#include "docreward/matching.hpp"
#include "docreward/table_teds.hpp"
#include "docreward/text_distance.hpp"
#include "docreward/unicode.hpp"
#include "json.hpp"
#include "text_util.hpp"

namespace docreward {

namespace {

Document only_kinds(const Document& doc, std::initializer_list<SegmentKind> kinds) {
  Document out;
  out.source_mode = doc.source_mode;
  for (const auto& s : doc.segments) {
    if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end()) continue;
    Segment copy = s;
    copy.index = out.segments.size();
    out.segments.push_back(std::move(copy));
  }
  return out;
}

std::string join_texts(const Document& doc, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (i) out += sep;
    out += doc.segments[i].text;
  }
  return out;
}

Document segment_side(std::string_view source, const EvalOptions& options, bool allow_fallback,
                      bool* used_fallback) {
  const SourceMode mode = detect_source_mode(source);
  try {
    return segment_markdown(source, mode, options.policy);
  } catch (const MalformedTags&) {
    if (!allow_fallback) throw;
    if (used_fallback) *used_fallback = true;
    return segment_markdown(source, SourceMode::PlainBlocks, options.policy);
  }
}

// Pairs same-kind segments through the assignment solver; `score` maps a
// matched (gt, pred) pair to a value, `miss` is the value for an unmatched
// ground-truth segment. Returns the mean over ground-truth segments.
template <typename Score>
double mean_over_matched(const Document& gt, const Document& pred, Score score, double miss) {
  const MatchResult m = hungarian_assign(build_cost_matrix(gt, pred));
  std::vector<double> per_gt(gt.size(), miss);
  for (const auto& p : m.pairs) {
    per_gt[p.ref_index] = score(gt.segments[p.ref_index], pred.segments[p.pred_index]);
  }
  double sum = 0.0;
  for (double v : per_gt) sum += v;
  return sum / static_cast<double>(per_gt.size());
}

class Mean {
 public:
  void add(std::optional<double> v) {
    if (!v) return;
    sum_ += *v;
    ++n_;
  }
  std::optional<double> value() const {
    if (n_ == 0) return std::nullopt;
    return sum_ / static_cast<double>(n_);
  }

 private:
  double sum_ = 0.0;
  std::size_t n_ = 0;
};

struct Accumulator {
  std::size_t n = 0;
  Mean text, formula, table_ned, teds, teds_s, read_order, doc, overall;

  void add(const DocScore& s) {
    ++n;
    text.add(s.text_ned);
    formula.add(s.formula_ned);
    table_ned.add(s.table_ned);
    teds.add(s.table_teds);
    teds_s.add(s.table_teds_s);
    read_order.add(s.read_order_ned);
    doc.add(s.doc_ned);
    overall.add(s.overall_edit());
  }

  AggregateScores result() const {
    return {n,
            text.value(),
            formula.value(),
            table_ned.value(),
            teds.value(),
            teds_s.value(),
            read_order.value(),
            doc.value(),
            overall.value()};
  }
};

std::string fixed4(std::optional<double> v, std::string_view absent) {
  if (!v) return std::string(absent);
  return fmt::format("{:.4f}", *v);
}

std::string json_string(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

std::string json_scores(const AggregateScores& a) {
  return fmt::format(
      "{{\"n_docs\":{},\"text_ned\":{},\"formula_ned\":{},\"table_ned\":{},\"table_teds\":{},"
      "\"table_teds_s\":{},\"read_order_ned\":{},\"doc_ned\":{},\"overall_edit\":{}}}",
      a.n_docs, fixed4(a.text_ned, "null"), fixed4(a.formula_ned, "null"),
      fixed4(a.table_ned, "null"), fixed4(a.table_teds, "null"), fixed4(a.table_teds_s, "null"),
      fixed4(a.read_order_ned, "null"), fixed4(a.doc_ned, "null"),
      fixed4(a.overall_edit, "null"));
}

std::string json_doc(const DocScore& d) {
  return fmt::format(
      "{{\"doc_id\":{},\"text_ned\":{},\"formula_ned\":{},\"table_ned\":{},\"table_teds\":{},"
      "\"table_teds_s\":{},\"read_order_ned\":{},\"doc_ned\":{},\"overall_edit\":{}}}",
      json_string(d.doc_id), fixed4(d.text_ned, "null"), fixed4(d.formula_ned, "null"),
      fixed4(d.table_ned, "null"), fixed4(d.table_teds, "null"),
      fixed4(d.table_teds_s, "null"), fixed4(d.read_order_ned, "null"),
      fixed4(d.doc_ned, "null"), fixed4(d.overall_edit(), "null"));
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

std::string csv_row(std::string_view group, const AggregateScores& a) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{}\n", csv_field(group), a.n_docs,
                     fixed4(a.text_ned, ""), fixed4(a.formula_ned, ""), fixed4(a.table_ned, ""),
                     fixed4(a.table_teds, ""), fixed4(a.table_teds_s, ""),
                     fixed4(a.read_order_ned, ""), fixed4(a.doc_ned, ""),
                     fixed4(a.overall_edit, ""));
}

std::string md_cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += (c == '\n' ? ' ' : c);
  }
  return out;
}

std::string md_row(std::string_view group, const AggregateScores& a) {
  return fmt::format("| {} | {} | {} | {} | {} | {} | {} | {} | {} |\n", group, a.n_docs,
                     fixed4(a.text_ned, "-"), fixed4(a.formula_ned, "-"),
                     fixed4(a.table_teds, "-"), fixed4(a.table_teds_s, "-"),
                     fixed4(a.table_ned, "-"), fixed4(a.read_order_ned, "-"),
                     fixed4(a.overall_edit, "-"));
}

}  // namespace

double DocScore::overall_edit() const {
  double sum = read_order_ned;
  int n = 1;
  for (const auto& v : {text_ned, formula_ned, table_ned}) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  return sum / n;
}

double reading_order_score(const Document& reference, const Document& prediction) {
  auto concat = [](const Document& d) {
    std::u32string out;
    bool first = true;
    for (const auto& s : d.segments) {
      if (s.kind != SegmentKind::Text) continue;
      if (!first) out.push_back(kSegmentSeparator);
      first = false;
      out += unicode::decode_utf8(s.text);
    }
    return out;
  };
  return normalized_edit_distance(concat(reference), concat(prediction));
}

DocScore evaluate_document(const EvalRecord& record, const EvalOptions& options) {
  DocScore score;
  score.doc_id = record.doc_id;
  const Document gt = segment_side(record.ground_truth, options, false, nullptr);
  const Document pred =
      segment_side(record.prediction, options, options.fallback_to_plain, &score.used_fallback);

  const Document gt_text = only_kinds(gt, {SegmentKind::Text, SegmentKind::Heading});
  if (!gt_text.empty()) {
    const Document pred_text = only_kinds(pred, {SegmentKind::Text, SegmentKind::Heading});
    score.text_ned = normalized_edit_distance(join_texts(gt_text, "\n\n"),
                                              join_texts(pred_text, "\n\n"));
  }

  const Document gt_tables = only_kinds(gt, {SegmentKind::Table});
  if (!gt_tables.empty()) {
    const Document pred_tables = only_kinds(pred, {SegmentKind::Table});
    score.table_teds = mean_over_matched(
        gt_tables, pred_tables,
        [](const Segment& g, const Segment& p) { return teds(p.raw, g.raw, false); }, 0.0);
    score.table_teds_s = mean_over_matched(
        gt_tables, pred_tables,
        [](const Segment& g, const Segment& p) { return teds(p.raw, g.raw, true); }, 0.0);
    score.table_ned = mean_over_matched(
        gt_tables, pred_tables,
        [](const Segment& g, const Segment& p) {
          return normalized_edit_distance(trim(g.raw), trim(p.raw));
        },
        1.0);
  }

  const Document gt_formulas = only_kinds(gt, {SegmentKind::Formula});
  if (!gt_formulas.empty()) {
    const Document pred_formulas = only_kinds(pred, {SegmentKind::Formula});
    score.formula_ned = mean_over_matched(
        gt_formulas, pred_formulas,
        [](const Segment& g, const Segment& p) {
          return normalized_edit_distance(trim(g.raw), trim(p.raw));
        },
        1.0);
  }

  score.read_order_ned = reading_order_score(gt, pred);
  score.doc_ned = normalized_edit_distance(join_texts(gt, "\n\n"), join_texts(pred, "\n\n"));
  return score;
}

EvalReport aggregate(const std::vector<DocScore>& scores, const std::vector<EvalRecord>& records,
                     std::string_view group_by) {
  std::unordered_map<std::string, const EvalRecord*> by_id;
  for (const auto& r : records) by_id.emplace(r.doc_id, &r);

  EvalReport report;
  report.group_by = std::string(group_by);
  report.per_doc = scores;
  std::stable_sort(report.per_doc.begin(), report.per_doc.end(),
                   [](const DocScore& a, const DocScore& b) { return a.doc_id < b.doc_id; });
  std::map<std::string, Accumulator> groups;
  Accumulator all;
  for (const auto& s : report.per_doc) {
    std::string key = "all";
    if (!group_by.empty()) {
      const auto it = by_id.find(s.doc_id);
      if (it == by_id.end()) {
        throw UnknownAttributeKey("no record for doc_id '" + s.doc_id + "'");
      }
      const auto attr = it->second->attributes.find(std::string(group_by));
      if (attr == it->second->attributes.end()) {
        throw UnknownAttributeKey("document '" + s.doc_id + "' has no attribute '" +
                                  std::string(group_by) + "'");
      }
      key = attr->second;
    }
    groups[key].add(s);
    all.add(s);
  }
  for (const auto& [key, acc] : groups) report.aggregates.emplace(key, acc.result());
  report.overall = all.result();
  return report;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "md" || name == "markdown") return ReportFormat::Markdown;
  throw UnsupportedFormat("unsupported report format '" + std::string(name) + "'");
}

std::string emit_report(const EvalReport& report, ReportFormat format) {
  std::string out;
  switch (format) {
    case ReportFormat::Json: {
      out = "{\"group_by\":" + json_string(report.group_by) + ",\"per_doc\":[";
      for (std::size_t i = 0; i < report.per_doc.size(); ++i) {
        if (i) out += ',';
        out += json_doc(report.per_doc[i]);
      }
      out += "],\"aggregates\":{";
      bool first = true;
      for (const auto& [key, a] : report.aggregates) {
        if (!first) out += ',';
        first = false;
        out += json_string(key) + ":" + json_scores(a);
      }
      out += "},\"overall\":" + json_scores(report.overall) + "}\n";
      break;
    }
    case ReportFormat::Csv:
      out =
          "group,n_docs,text_ned,formula_ned,table_ned,table_teds,table_teds_s,read_order_ned,"
          "doc_ned,overall_edit\n";
      for (const auto& [key, a] : report.aggregates) out += csv_row(key, a);
      out += csv_row("ALL", report.overall);
      break;
    case ReportFormat::Markdown:
      out =
          "| Group | Docs | Text Edit | Formula Edit | Table TEDS | Table TEDS-S | Table Edit | "
          "Read Order Edit | Overall Edit |\n"
          "|---|---:|---:|---:|---:|---:|---:|---:|---:|\n";
      for (const auto& [key, a] : report.aggregates) out += md_row(md_cell(key), a);
      out += md_row("**All**", report.overall);
      break;
  }
  return out;
}

std::vector<DocScore> evaluate_all(const std::vector<EvalRecord>& records,
                                   const EvalOptions& options, unsigned jobs) {
  std::vector<DocScore> out(records.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, records.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < records.size(); ++i) out[i] = evaluate_document(records[i], options);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < records.size(); i = next++) {
        try {
          out[i] = evaluate_document(records[i], options);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

EvalRecord parse_eval_record(std::string_view json_line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_line);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON record: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("record must be a JSON object");
  auto required_string = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) {
      throw SchemaError(std::string("record field '") + key + "' must be a string");
    }
    return j[key].get<std::string>();
  };
  EvalRecord r;
  r.doc_id = required_string("doc_id");
  r.prediction = required_string("prediction");
  r.ground_truth = required_string("ground_truth");
  if (j.contains("attributes")) {
    const auto& attrs = j["attributes"];
    if (!attrs.is_object()) throw SchemaError("record field 'attributes' must be an object");
    for (const auto& [key, value] : attrs.items()) {
      if (value.is_string()) {
        r.attributes[key] = value.get<std::string>();
      } else if (value.is_number() || value.is_boolean()) {
        r.attributes[key] = value.dump();
      } else {
        throw SchemaError("attribute '" + key + "' must be a scalar");
      }
    }
  }
  return r;
}

}  // namespace docreward
