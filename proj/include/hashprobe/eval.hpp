// Copyright 2026 The HashProbe Authors.
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
#include <span>
#include <string>
#include <vector>

#include "hashprobe/search.hpp"

namespace hashprobe {

/// (1/R) * sum_{j<=R} precision@j * rel(j). Ranks past the end of a short
/// result list count as irrelevant. Throws InvalidArgument for R < 1.
double average_precision_at_r(const SearchResult& result, const LabelSet& query_labels,
                              std::span<const LabelSet> ref_labels, std::uint32_t r);

/// Number of reference points sharing a label with each query.
std::vector<std::uint64_t> relevant_totals(std::span<const LabelSet> query_labels,
                                           std::span<const LabelSet> ref_labels);

/// Mean AP@R over queries that have at least one relevant reference point;
/// the others are skipped and counted in a log line. Returns 0 when every
/// query is skipped. Throws InvalidArgument for an empty query set.
double map_at_r(std::span<const SearchResult> results, std::span<const LabelSet> query_labels,
                std::span<const LabelSet> ref_labels, std::uint32_t r);
/// Same, with relevant_totals precomputed.
double map_at_r(std::span<const SearchResult> results, std::span<const LabelSet> query_labels,
                std::span<const LabelSet> ref_labels, std::uint32_t r,
                std::span<const std::uint64_t> totals);

/// Mean over queries of candidates_examined / N * 100.
double ard_percent(std::span<const SearchResult> results, std::uint64_t n);

struct MethodReport {
  Method method = Method::kDnn;
  std::map<std::uint32_t, double> map_at_r;
  double ard_percent = 0.0;
  /// Per-phase medians over queries; total is the median of per-query totals.
  PhaseTimings median;
  double median_total_ms = 0.0;
};

struct ExperimentConfig {
  CandidateBudget budget = CandidateBudget::top_entries(1);
  std::vector<std::uint32_t> map_grid = {10, 20, 30, 40, 50};
  std::vector<Method> methods = {Method::kDnn, Method::kExhaustive, Method::kNaive};
  std::uint64_t seed = 0;
};

struct EvalReport {
  /// In method-name order.
  std::vector<MethodReport> methods;
  std::uint32_t code_bits = 0;
  std::uint32_t index_bits = 0;
  std::uint64_t num_reference = 0;
  std::uint64_t num_queries = 0;
  std::uint32_t k = 0;
  CandidateBudget budget;
  std::uint64_t seed = 0;
  std::uint64_t skipped_queries = 0;

  const MethodReport& at(Method method) const;
};

/// Evaluates each configured method over all of `queries` with k = max(R grid).
/// Throws InvalidArgument when c, d, F or N disagree across the artifacts.
EvalReport run_experiment(const ReferenceDataset& refs, const QuerySet& queries,
                          const PredictorModel& model, const InvertedIndex& index,
                          const ExperimentConfig& cfg);

struct ReportRow {
  std::string method;
  std::uint32_t r = 0;
  double map = 0.0;
  double ard_percent = 0.0;
  double predict_ms = 0.0;
  double rank_ms = 0.0;
  double rerank_ms = 0.0;
  double total_ms = 0.0;
};

inline constexpr const char* kReportHeader =
    "method,R,map,ard_percent,predict_ms,rank_ms,rerank_ms,total_ms";

std::vector<ReportRow> report_rows(const EvalReport& report);
/// Header plus one line per row, floats with 6 significant digits.
std::string format_report_csv(std::span<const ReportRow> rows);
std::vector<ReportRow> parse_report_csv(const std::string& text);
void write_report_csv(const EvalReport& report, const std::filesystem::path& path);

}  // namespace hashprobe
