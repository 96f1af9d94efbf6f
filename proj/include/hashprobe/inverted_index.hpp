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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hashprobe/bitcode.hpp"

namespace hashprobe {

/// How far down a ranked entry list to read. Entries are always consumed
/// whole, so a count budget may be overshot by up to one entry.
struct CandidateBudget {
  enum class Mode { kTopEntries, kMinCandidates };

  Mode mode = Mode::kTopEntries;
  std::uint64_t amount = 1;

  static CandidateBudget top_entries(std::uint64_t r) {
    return {Mode::kTopEntries, r};
  }
  static CandidateBudget min_candidates(std::uint64_t n) {
    return {Mode::kMinCandidates, n};
  }

  friend bool operator==(const CandidateBudget&, const CandidateBudget&) = default;
};

/// 2^d posting lists in CSR form: entry X holds ids_[offsets_[X], offsets_[X+1]),
/// strictly ascending. Every reference id appears in exactly one entry.
class InvertedIndex {
 public:
  InvertedIndex() = default;

  /// Builds from explicit posting-list lengths and concatenated ids, e.g. when
  /// loading from disk. Validates the partition invariant.
  static InvertedIndex from_lists(std::uint32_t d, std::uint64_t total,
                                  std::span<const std::uint32_t> lengths,
                                  std::vector<std::uint32_t> ids);

  std::uint32_t d() const { return d_; }
  std::uint64_t total() const { return total_; }
  std::size_t num_entries() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }

  std::span<const std::uint32_t> entry(std::uint32_t x) const {
    return std::span<const std::uint32_t>(ids_).subspan(
        offsets_[x], offsets_[x + 1] - offsets_[x]);
  }
  /// Throws InvalidArgument for codes of the wrong width or value >= 2^d.
  std::uint64_t entry_size(IndexCode x) const;

  std::span<const std::uint32_t> ids() const { return ids_; }
  std::vector<std::uint32_t> entry_lengths() const;

  friend bool operator==(const InvertedIndex&, const InvertedIndex&) = default;

 private:
  friend InvertedIndex build_index(const CodeSet&, std::uint32_t);
  friend InvertedIndex build_index_serial(const CodeSet&, std::uint32_t);

  std::uint32_t d_ = 0;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> offsets_;
  std::vector<std::uint32_t> ids_;
};

/// Groups reference ids by the d-bit prefix of their code. Prefix extraction
/// runs in parallel; the result is identical to build_index_serial.
InvertedIndex build_index(const CodeSet& codes, std::uint32_t d);
InvertedIndex build_index_serial(const CodeSet& codes, std::uint32_t d);

struct GatheredCandidates {
  std::vector<std::uint32_t> ids;
  std::uint32_t entries_probed = 0;
};

/// Concatenates posting lists in `ranked` order until `budget` is met.
GatheredCandidates gather_candidates(const InvertedIndex& index,
                                     std::span<const std::uint32_t> ranked,
                                     CandidateBudget budget);

struct OccupancyStats {
  std::uint64_t non_empty = 0;
  std::uint64_t max_size = 0;
  double mean_non_empty = 0.0;
};
OccupancyStats occupancy(const InvertedIndex& index);

}  // namespace hashprobe
