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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "docreward/segmenter.hpp"

namespace docreward {

struct EvalRecord {
  std::string doc_id;
  std::string prediction;
  std::string ground_truth;
  std::map<std::string, std::string> attributes;
};

// Absent (nullopt) means the type does not occur in the ground truth; such
// values never enter an aggregate.
struct DocScore {
  std::string doc_id;
  std::optional<double> text_ned;
  std::optional<double> formula_ned;
  std::optional<double> table_ned;
  std::optional<double> table_teds;
  std::optional<double> table_teds_s;
  double read_order_ned = 0.0;
  double doc_ned = 0.0;
  bool used_fallback = false;

  // Mean of the present edit metrics among text, formula, table and reading
  // order.
  double overall_edit() const;
};

struct AggregateScores {
  std::size_t n_docs = 0;
  std::optional<double> text_ned;
  std::optional<double> formula_ned;
  std::optional<double> table_ned;
  std::optional<double> table_teds;
  std::optional<double> table_teds_s;
  std::optional<double> read_order_ned;
  std::optional<double> doc_ned;
  std::optional<double> overall_edit;
};

struct EvalReport {
  std::string group_by;  // empty when ungrouped
  std::vector<DocScore> per_doc;
  std::map<std::string, AggregateScores> aggregates;
  AggregateScores overall;
};

struct EvalOptions {
  NormalizationPolicy policy;
  // Re-read a prediction with broken <ele> tags as plain blocks.
  bool fallback_to_plain = true;
};

// Separator placed between text segments before reading-order NED, so
// boundaries cost edits.
inline constexpr char32_t kSegmentSeparator = U'\u001F';

double reading_order_score(const Document& reference, const Document& prediction);

DocScore evaluate_document(const EvalRecord& record, const EvalOptions& options = {});

// Groups by `group_by` (all documents in one "all" group when empty). Throws
// UnknownAttributeKey when a record lacks the key. Scores and records are
// aligned by doc_id.
EvalReport aggregate(const std::vector<DocScore>& scores, const std::vector<EvalRecord>& records,
                     std::string_view group_by);

enum class ReportFormat { Json, Csv, Markdown };

ReportFormat parse_report_format(std::string_view name);  // throws UnsupportedFormat

// Deterministic bytes: fixed key order and four-decimal floats.
std::string emit_report(const EvalReport& report, ReportFormat format);

// Per-document scores with `jobs` worker threads; output order follows input.
std::vector<DocScore> evaluate_all(const std::vector<EvalRecord>& records,
                                   const EvalOptions& options = {}, unsigned jobs = 1);

EvalRecord parse_eval_record(std::string_view json_line);  // throws SchemaError

}  // namespace docreward
