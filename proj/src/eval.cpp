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

#include "hashprobe/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hashprobe/errors.hpp"
#include "hashprobe/log.hpp"

namespace hashprobe {

namespace {

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(),
                                         values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

double average_precision_at_r(const SearchResult& result, const LabelSet& query_labels,
                              std::span<const LabelSet> ref_labels, std::uint32_t r) {
  if (r < 1) throw InvalidArgument("MAP@R needs R >= 1");
  const std::size_t depth = std::min<std::size_t>(r, result.neighbors.size());
  std::uint32_t hits = 0;
  double sum = 0.0;
  for (std::size_t j = 0; j < depth; ++j) {
    const std::uint32_t id = result.neighbors[j].id;
    if (id >= ref_labels.size()) throw InvalidArgument("neighbor id outside the label set");
    if (is_relevant(query_labels, ref_labels[id])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(j + 1);
    }
  }
  return sum / static_cast<double>(r);
}

std::vector<std::uint64_t> relevant_totals(std::span<const LabelSet> query_labels,
                                           std::span<const LabelSet> ref_labels) {
  std::vector<std::uint64_t> totals(query_labels.size(), 0);
  const auto n = static_cast<std::int64_t>(query_labels.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t q = 0; q < n; ++q) {
    std::uint64_t count = 0;
    for (const auto& ref : ref_labels) count += is_relevant(query_labels[q], ref) ? 1 : 0;
    totals[static_cast<std::size_t>(q)] = count;
  }
  return totals;
}

double map_at_r(std::span<const SearchResult> results, std::span<const LabelSet> query_labels,
                std::span<const LabelSet> ref_labels, std::uint32_t r) {
  return map_at_r(results, query_labels, ref_labels, r,
                  relevant_totals(query_labels, ref_labels));
}

double map_at_r(std::span<const SearchResult> results, std::span<const LabelSet> query_labels,
                std::span<const LabelSet> ref_labels, std::uint32_t r,
                std::span<const std::uint64_t> totals) {
  if (results.empty()) throw InvalidArgument("MAP over an empty query set");
  if (results.size() != query_labels.size() || totals.size() != results.size()) {
    throw InvalidArgument("MAP: result and label counts differ");
  }
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t q = 0; q < results.size(); ++q) {
    if (totals[q] == 0) continue;
    sum += average_precision_at_r(results[q], query_labels[q], ref_labels, r);
    ++used;
  }
  if (used < results.size()) {
    spdlog::info("MAP@{}: skipped {} of {} queries with no relevant reference point", r,
                 results.size() - used, results.size());
  }
  return used == 0 ? 0.0 : sum / static_cast<double>(used);
}

double ard_percent(std::span<const SearchResult> results, std::uint64_t n) {
  if (n < 1) throw InvalidArgument("ARD% needs N >= 1");
  if (results.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : results) {
    sum += static_cast<double>(r.candidates_examined) / static_cast<double>(n) * 100.0;
  }
  return sum / static_cast<double>(results.size());
}

const MethodReport& EvalReport::at(Method method) const {
  for (const auto& m : methods) {
    if (m.method == method) return m;
  }
  throw InvalidArgument("report has no row for " + std::string(method_name(method)));
}

EvalReport run_experiment(const ReferenceDataset& refs, const QuerySet& queries,
                          const PredictorModel& model, const InvertedIndex& index,
                          const ExperimentConfig& cfg) {
  if (queries.size() == 0) throw InvalidArgument("experiment has no queries");
  if (cfg.map_grid.empty()) throw InvalidArgument("empty MAP@R grid");
  if (refs.labels.size() != refs.size()) {
    throw DimensionMismatch("reference labels and codes differ in N");
  }
  if (queries.codes.size() != queries.size() || queries.features.rows() != queries.size()) {
    throw DimensionMismatch("query codes, features and labels differ in count");
  }
  if (queries.codes.length() != refs.codes.length()) {
    throw DimensionMismatch("query and reference code lengths differ");
  }
  if (index.total() != refs.size()) {
    throw DimensionMismatch("index N differs from the reference set");
  }
  check_compatible(model, index);
  if (model.feature_dim() != queries.features.dim()) {
    throw DimensionMismatch("model F = " + std::to_string(model.feature_dim()) +
                            " but queries have F = " +
                            std::to_string(queries.features.dim()));
  }

  EvalReport report;
  report.code_bits = refs.codes.length();
  report.index_bits = index.d();
  report.num_reference = refs.size();
  report.num_queries = queries.size();
  report.k = *std::max_element(cfg.map_grid.begin(), cfg.map_grid.end());
  report.budget = cfg.budget;
  report.seed = cfg.seed;
  if (report.k < 1) throw InvalidArgument("MAP@R grid values must be >= 1");

  const auto totals = relevant_totals(queries.labels, refs.labels);
  report.skipped_queries =
      static_cast<std::uint64_t>(std::count(totals.begin(), totals.end(), 0u));

  std::vector<Method> methods = cfg.methods;
  std::sort(methods.begin(), methods.end(),
            [](Method a, Method b) { return method_name(a) < method_name(b); });
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());

  const SearchContext ctx{&refs, &index, &model};
  for (Method method : methods) {
    const SearchPlan plan{method, report.k, cfg.budget};
    const auto results = search_batch(queries, ctx, plan);
    MethodReport m;
    m.method = method;
    for (std::uint32_t r : cfg.map_grid) {
      m.map_at_r[r] = map_at_r(results, queries.labels, refs.labels, r, totals);
    }
    m.ard_percent = ard_percent(results, refs.size());
    std::vector<double> predict, rank, rerank, total;
    for (const auto& res : results) {
      predict.push_back(res.timings.predict_ms);
      rank.push_back(res.timings.rank_ms);
      rerank.push_back(res.timings.rerank_ms);
      total.push_back(res.timings.total_ms());
    }
    m.median = {median(predict), median(rank), median(rerank)};
    m.median_total_ms = median(std::move(total));
    report.methods.push_back(std::move(m));
  }
  return report;
}

std::vector<ReportRow> report_rows(const EvalReport& report) {
  std::vector<ReportRow> rows;
  for (const auto& m : report.methods) {
    for (const auto& [r, value] : m.map_at_r) {
      rows.push_back({std::string(method_name(m.method)), r, value, m.ard_percent,
                      m.median.predict_ms, m.median.rank_ms, m.median.rerank_ms,
                      m.median_total_ms});
    }
  }
  return rows;
}

std::string format_report_csv(std::span<const ReportRow> rows) {
  std::string out = kReportHeader;
  out += '\n';
  for (const auto& row : rows) {
    out += row.method + ',' + std::to_string(row.r) + ',' + format_double(row.map) + ',' +
           format_double(row.ard_percent) + ',' + format_double(row.predict_ms) + ',' +
           format_double(row.rank_ms) + ',' + format_double(row.rerank_ms) + ',' +
           format_double(row.total_ms) + '\n';
  }
  return out;
}

std::vector<ReportRow> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader) {
    throw FormatError("report CSV: unexpected header");
  }
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 8) {
      throw FormatError("report CSV line " + std::to_string(line_no) + ": expected 8 fields");
    }
    try {
      ReportRow row;
      row.method = fields[0];
      row.r = static_cast<std::uint32_t>(std::stoul(fields[1]));
      row.map = std::stod(fields[2]);
      row.ard_percent = std::stod(fields[3]);
      row.predict_ms = std::stod(fields[4]);
      row.rank_ms = std::stod(fields[5]);
      row.rerank_ms = std::stod(fields[6]);
      row.total_ms = std::stod(fields[7]);
      rows.push_back(std::move(row));
    } catch (const std::logic_error&) {
      throw FormatError("report CSV line " + std::to_string(line_no) + ": bad number");
    }
  }
  return rows;
}

void write_report_csv(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << format_report_csv(report_rows(report));
  if (!out) throw Error("write to " + path.string() + " failed");
}

}  // namespace hashprobe
