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
#include <initializer_list>
#include <span>
#include <vector>

#include "hashprobe/inverted_index.hpp"

namespace hashprobe {

/// Sorted, de-duplicated set of class-label ids.
class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(std::initializer_list<std::uint32_t> labels);
  explicit LabelSet(std::vector<std::uint32_t> labels);

  std::span<const std::uint32_t> labels() const { return labels_; }
  bool empty() const { return labels_.empty(); }
  std::size_t size() const { return labels_.size(); }

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::vector<std::uint32_t> labels_;
};

/// True iff the two sets share at least one label.
bool is_relevant(const LabelSet& query, const LabelSet& ref);

/// Per-entry relevance of one query: scores[X] is the fraction of entry X's
/// members that share a label with the query, 0 for empty entries.
struct RelevanceTargets {
  std::uint32_t query_id = 0;
  std::vector<double> scores;
  /// Number of relevant members per entry (numerator of each score).
  std::vector<std::uint32_t> relevant_counts;

  std::uint64_t total_relevant() const;
};

/// O(N + 2^d). Throws InvalidArgument if ref_labels.size() != index.total().
RelevanceTargets compute_targets(const LabelSet& query, const InvertedIndex& index,
                                 std::span<const LabelSet> ref_labels,
                                 std::uint32_t query_id = 0);

/// compute_targets for many queries, OpenMP-parallel over queries.
std::vector<RelevanceTargets> compute_targets_batch(
    std::span<const LabelSet> queries, const InvertedIndex& index,
    std::span<const LabelSet> ref_labels);
std::vector<RelevanceTargets> compute_targets_batch_serial(
    std::span<const LabelSet> queries, const InvertedIndex& index,
    std::span<const LabelSet> ref_labels);

/// Rescales scores to sum to one. Throws DegenerateTarget when every score is 0.
std::vector<double> normalize_targets(const RelevanceTargets& targets);

}  // namespace hashprobe
