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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hashprobe/dataset.hpp"
#include "hashprobe/inverted_index.hpp"
#include "hashprobe/predictor.hpp"

namespace hashprobe {

struct Neighbor {
  std::uint32_t id = 0;
  std::uint32_t distance = 0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Wall-clock milliseconds for the three query phases: relevance prediction,
/// entry ranking, and candidate Hamming reranking.
struct PhaseTimings {
  double predict_ms = 0.0;
  double rank_ms = 0.0;
  double rerank_ms = 0.0;

  double total_ms() const { return predict_ms + rank_ms + rerank_ms; }
};

struct SearchResult {
  /// Sorted by (distance, id) ascending; at most k long.
  std::vector<Neighbor> neighbors;
  std::uint64_t candidates_examined = 0;
  std::uint32_t entries_probed = 0;
  /// Entry scores the ranking step touched; always 2^d for indexed methods.
  std::uint64_t scores_ranked = 0;
  PhaseTimings timings;
};

enum class Method { kDnn, kExhaustive, kNaive };

/// "dnn-index", "exhaustive", "naive-index".
std::string_view method_name(Method method);
/// Accepts the names above plus "dnn" and "naive".
Method parse_method(std::string_view name);

/// Entry values ordered by popcount(prefix XOR X), ties by X ascending.
std::vector<std::uint32_t> rank_entries_by_prefix(std::uint32_t prefix, std::uint32_t d);

/// Entry values ordered by score descending, ties by X ascending. When
/// `needed` is set only the first `needed` positions are guaranteed sorted.
std::vector<std::uint32_t> rank_entries_by_score(std::span<const double> scores,
                                                 std::optional<std::size_t> needed = {});

/// Top-k of `candidates` by Hamming distance to `query`, ties by id.
std::vector<Neighbor> rerank(BitCodeView query, const CodeSet& codes,
                             std::span<const std::uint32_t> candidates, std::uint32_t k);

SearchResult search_exhaustive(const Query& q, const ReferenceDataset& refs, std::uint32_t k);

/// Multi-probe over the index: entries nearest the query's own d-bit prefix
/// first.
SearchResult search_naive(const Query& q, const InvertedIndex& index,
                          const ReferenceDataset& refs, std::uint32_t k,
                          CandidateBudget budget);

/// Entries ranked by the predictor's relevance scores for q.features.
SearchResult search_dnn(const Query& q, const PredictorModel& model,
                        const InvertedIndex& index, const ReferenceDataset& refs,
                        std::uint32_t k, CandidateBudget budget);

/// Frozen artifacts shared by every query of a batch. `index` and `model` may
/// be null for methods that do not use them.
struct SearchContext {
  const ReferenceDataset* refs = nullptr;
  const InvertedIndex* index = nullptr;
  const PredictorModel* model = nullptr;
};

struct SearchPlan {
  Method method = Method::kDnn;
  std::uint32_t k = 50;
  CandidateBudget budget = CandidateBudget::top_entries(1);
};

/// Runs every query of `queries`, OpenMP-parallel across queries. Results are
/// identical to search_batch_serial apart from timings.
std::vector<SearchResult> search_batch(const QuerySet& queries, const SearchContext& ctx,
                                       const SearchPlan& plan);
std::vector<SearchResult> search_batch_serial(const QuerySet& queries,
                                              const SearchContext& ctx,
                                              const SearchPlan& plan);

SearchResult search_one(const Query& q, const SearchContext& ctx, const SearchPlan& plan);

}  // namespace hashprobe
