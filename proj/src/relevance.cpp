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

#include "hashprobe/relevance.hpp"

#include <algorithm>
#include <string>

#include "hashprobe/errors.hpp"

namespace hashprobe {

LabelSet::LabelSet(std::initializer_list<std::uint32_t> labels)
    : LabelSet(std::vector<std::uint32_t>(labels)) {}

LabelSet::LabelSet(std::vector<std::uint32_t> labels) : labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end());
  labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
}

bool is_relevant(const LabelSet& query, const LabelSet& ref) {
  auto a = query.labels().begin();
  auto b = ref.labels().begin();
  const auto a_end = query.labels().end();
  const auto b_end = ref.labels().end();
  while (a != a_end && b != b_end) {
    if (*a == *b) return true;
    if (*a < *b) {
      ++a;
    } else {
      ++b;
    }
  }
  return false;
}

std::uint64_t RelevanceTargets::total_relevant() const {
  std::uint64_t total = 0;
  for (std::uint32_t count : relevant_counts) total += count;
  return total;
}

RelevanceTargets compute_targets(const LabelSet& query, const InvertedIndex& index,
                                 std::span<const LabelSet> ref_labels,
                                 std::uint32_t query_id) {
  if (ref_labels.size() != index.total()) {
    throw InvalidArgument("compute_targets: " + std::to_string(ref_labels.size()) +
                          " label sets for an index over " +
                          std::to_string(index.total()) + " points");
  }
  RelevanceTargets targets;
  targets.query_id = query_id;
  targets.scores.assign(index.num_entries(), 0.0);
  targets.relevant_counts.assign(index.num_entries(), 0);
  for (std::uint32_t x = 0; x < index.num_entries(); ++x) {
    const auto members = index.entry(x);
    if (members.empty()) continue;
    std::uint32_t hits = 0;
    for (std::uint32_t id : members) hits += is_relevant(query, ref_labels[id]) ? 1 : 0;
    targets.relevant_counts[x] = hits;
    targets.scores[x] = static_cast<double>(hits) / static_cast<double>(members.size());
  }
  return targets;
}

std::vector<RelevanceTargets> compute_targets_batch(
    std::span<const LabelSet> queries, const InvertedIndex& index,
    std::span<const LabelSet> ref_labels) {
  if (ref_labels.size() != index.total()) {
    throw InvalidArgument("compute_targets_batch: label count does not match index");
  }
  std::vector<RelevanceTargets> out(queries.size());
  const auto n = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t j = 0; j < n; ++j) {
    const auto q = static_cast<std::size_t>(j);
    out[q] = compute_targets(queries[q], index, ref_labels, static_cast<std::uint32_t>(q));
  }
  return out;
}

std::vector<RelevanceTargets> compute_targets_batch_serial(
    std::span<const LabelSet> queries, const InvertedIndex& index,
    std::span<const LabelSet> ref_labels) {
  std::vector<RelevanceTargets> out;
  out.reserve(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    out.push_back(compute_targets(queries[q], index, ref_labels,
                                  static_cast<std::uint32_t>(q)));
  }
  return out;
}

std::vector<double> normalize_targets(const RelevanceTargets& targets) {
  double sum = 0.0;
  for (double s : targets.scores) sum += s;
  if (!(sum > 0.0)) {
    throw DegenerateTarget("query " + std::to_string(targets.query_id) +
                           " has no relevant reference point in any entry");
  }
  std::vector<double> out(targets.scores.size());
  for (std::size_t x = 0; x < out.size(); ++x) out[x] = targets.scores[x] / sum;
  return out;
}

}  // namespace hashprobe
