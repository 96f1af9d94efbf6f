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

#include "hashprobe/inverted_index.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "hashprobe/errors.hpp"

namespace hashprobe {

namespace {

void check_build_args(const CodeSet& codes, std::uint32_t d) {
  if (codes.empty()) throw InvalidArgument("build_index: empty dataset");
  if (d < 1 || d > kMaxIndexBits || d > codes.length()) {
    throw InvalidArgument("build_index: index width " + std::to_string(d) +
                          " outside [1, min(c, 24)] for c = " +
                          std::to_string(codes.length()));
  }
  if (codes.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("build_index: more than 2^32 - 1 reference points");
  }
}

}  // namespace

InvertedIndex InvertedIndex::from_lists(std::uint32_t d, std::uint64_t total,
                                        std::span<const std::uint32_t> lengths,
                                        std::vector<std::uint32_t> ids) {
  if (d < 1 || d > kMaxIndexBits) {
    throw InvalidArgument("index width " + std::to_string(d) + " outside [1, 24]");
  }
  if (lengths.size() != (std::size_t{1} << d)) {
    throw InvalidArgument("expected 2^d posting-list lengths");
  }
  if (ids.size() != total) {
    throw InvalidArgument("posting lists do not cover N ids");
  }
  InvertedIndex index;
  index.d_ = d;
  index.total_ = total;
  index.offsets_.resize(lengths.size() + 1, 0);
  for (std::size_t x = 0; x < lengths.size(); ++x) {
    index.offsets_[x + 1] = index.offsets_[x] + lengths[x];
  }
  if (index.offsets_.back() != total) {
    throw InvalidArgument("posting-list lengths do not sum to N");
  }
  std::vector<bool> seen(total, false);
  for (std::size_t x = 0; x < lengths.size(); ++x) {
    for (std::uint64_t k = index.offsets_[x]; k < index.offsets_[x + 1]; ++k) {
      const std::uint32_t id = ids[k];
      if (id >= total || seen[id]) {
        throw InvalidArgument("posting lists are not a partition of [0, N)");
      }
      if (k > index.offsets_[x] && ids[k - 1] >= id) {
        throw InvalidArgument("posting list " + std::to_string(x) +
                              " is not strictly ascending");
      }
      seen[id] = true;
    }
  }
  index.ids_ = std::move(ids);
  return index;
}

std::uint64_t InvertedIndex::entry_size(IndexCode x) const {
  if (x.width != d_ || x.value >= num_entries()) {
    throw InvalidArgument("index code out of range for d = " + std::to_string(d_));
  }
  return offsets_[x.value + 1] - offsets_[x.value];
}

std::vector<std::uint32_t> InvertedIndex::entry_lengths() const {
  std::vector<std::uint32_t> lengths(num_entries());
  for (std::size_t x = 0; x < lengths.size(); ++x) {
    lengths[x] = static_cast<std::uint32_t>(offsets_[x + 1] - offsets_[x]);
  }
  return lengths;
}

InvertedIndex build_index(const CodeSet& codes, std::uint32_t d) {
  check_build_args(codes, d);
  const std::size_t n = codes.size();
  std::vector<std::uint32_t> keys(n);
  const auto n_signed = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n_signed; ++i) {
    keys[static_cast<std::size_t>(i)] = index_prefix(codes[static_cast<std::size_t>(i)], d);
  }

  // Counting sort over keys; scanning ids in order keeps each list ascending.
  InvertedIndex index;
  index.d_ = d;
  index.total_ = n;
  index.offsets_.assign((std::size_t{1} << d) + 1, 0);
  for (std::uint32_t key : keys) ++index.offsets_[key + 1];
  for (std::size_t x = 1; x < index.offsets_.size(); ++x) {
    index.offsets_[x] += index.offsets_[x - 1];
  }
  std::vector<std::uint64_t> cursor(index.offsets_.begin(), index.offsets_.end() - 1);
  index.ids_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    index.ids_[cursor[keys[i]]++] = static_cast<std::uint32_t>(i);
  }
  return index;
}

InvertedIndex build_index_serial(const CodeSet& codes, std::uint32_t d) {
  check_build_args(codes, d);
  std::vector<std::vector<std::uint32_t>> lists(std::size_t{1} << d);
  for (std::size_t i = 0; i < codes.size(); ++i) {
    lists[extract_index_code(codes[i], d).value].push_back(static_cast<std::uint32_t>(i));
  }
  InvertedIndex index;
  index.d_ = d;
  index.total_ = codes.size();
  index.offsets_.assign(lists.size() + 1, 0);
  index.ids_.reserve(codes.size());
  for (std::size_t x = 0; x < lists.size(); ++x) {
    index.ids_.insert(index.ids_.end(), lists[x].begin(), lists[x].end());
    index.offsets_[x + 1] = index.ids_.size();
  }
  return index;
}

GatheredCandidates gather_candidates(const InvertedIndex& index,
                                     std::span<const std::uint32_t> ranked,
                                     CandidateBudget budget) {
  if (ranked.empty()) throw InvalidArgument("gather_candidates: no ranked entries");
  if (budget.amount < 1) throw InvalidArgument("gather_candidates: budget must be >= 1");
  for (std::uint32_t x : ranked) {
    if (x >= index.num_entries()) {
      throw InvalidArgument("gather_candidates: entry " + std::to_string(x) +
                            " out of range");
    }
  }

  GatheredCandidates out;
  if (budget.mode == CandidateBudget::Mode::kTopEntries) {
    if (budget.amount > ranked.size()) {
      throw InvalidArgument("gather_candidates: top-R exceeds ranked entry count");
    }
    const auto r = static_cast<std::size_t>(budget.amount);
    std::size_t total = 0;
    for (std::size_t i = 0; i < r; ++i) total += index.entry(ranked[i]).size();
    out.ids.reserve(total);
    for (std::size_t i = 0; i < r; ++i) {
      const auto list = index.entry(ranked[i]);
      out.ids.insert(out.ids.end(), list.begin(), list.end());
    }
    out.entries_probed = static_cast<std::uint32_t>(r);
    return out;
  }

  if (budget.amount > index.total()) {
    throw InvalidArgument("gather_candidates: candidate count " +
                          std::to_string(budget.amount) + " exceeds N = " +
                          std::to_string(index.total()));
  }
  for (std::uint32_t x : ranked) {
    if (out.ids.size() >= budget.amount) break;
    const auto list = index.entry(x);
    out.ids.insert(out.ids.end(), list.begin(), list.end());
    ++out.entries_probed;
  }
  return out;
}

OccupancyStats occupancy(const InvertedIndex& index) {
  OccupancyStats stats;
  for (std::uint32_t x = 0; x < index.num_entries(); ++x) {
    const std::uint64_t size = index.entry(x).size();
    if (size == 0) continue;
    ++stats.non_empty;
    stats.max_size = std::max(stats.max_size, size);
  }
  if (stats.non_empty > 0) {
    stats.mean_non_empty =
        static_cast<double>(index.total()) / static_cast<double>(stats.non_empty);
  }
  return stats;
}

}  // namespace hashprobe
