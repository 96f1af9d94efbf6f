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

#include "hashprobe/search.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <numeric>

#include "hashprobe/errors.hpp"

namespace hashprobe {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_k(std::uint32_t k) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
}

void check_code(const Query& q, const ReferenceDataset& refs) {
  if (q.code.length() != refs.codes.length()) {
    throw DimensionMismatch("query code has " + std::to_string(q.code.length()) +
                            " bits, reference codes have " +
                            std::to_string(refs.codes.length()));
  }
}

void check_index(const InvertedIndex& index, const ReferenceDataset& refs) {
  if (index.total() != refs.size()) {
    throw DimensionMismatch("index covers " + std::to_string(index.total()) +
                            " points, reference set has " + std::to_string(refs.size()));
  }
  if (index.d() > refs.codes.length()) {
    throw DimensionMismatch("index width exceeds the code length");
  }
}

std::optional<std::size_t> sorted_prefix_needed(CandidateBudget budget, std::size_t entries) {
  if (budget.mode == CandidateBudget::Mode::kTopEntries) {
    return std::min<std::size_t>(budget.amount, entries);
  }
  return std::nullopt;
}

SearchResult finish(const Query& q, const InvertedIndex& index, const ReferenceDataset& refs,
                    std::span<const std::uint32_t> ranked, std::uint32_t k,
                    CandidateBudget budget, SearchResult result) {
  auto start = Clock::now();
  auto gathered = gather_candidates(index, ranked, budget);
  result.neighbors = rerank(q.code, refs.codes, gathered.ids, k);
  result.candidates_examined = gathered.ids.size();
  result.entries_probed = gathered.entries_probed;
  result.timings.rerank_ms = ms_since(start);
  return result;
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::kDnn: return "dnn-index";
    case Method::kExhaustive: return "exhaustive";
    case Method::kNaive: return "naive-index";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "dnn-index" || name == "dnn") return Method::kDnn;
  if (name == "exhaustive") return Method::kExhaustive;
  if (name == "naive-index" || name == "naive") return Method::kNaive;
  throw InvalidArgument("unknown search method \"" + std::string(name) + "\"");
}

std::vector<std::uint32_t> rank_entries_by_prefix(std::uint32_t prefix, std::uint32_t d) {
  if (d < 1 || d > kMaxIndexBits) throw InvalidArgument("index width outside [1, 24]");
  const std::uint32_t n = 1u << d;
  if (prefix >= n) throw InvalidArgument("prefix out of range");
  // Counting sort on distance; scanning X upward keeps ties ascending.
  std::vector<std::uint32_t> start(d + 2, 0);
  for (std::uint32_t x = 0; x < n; ++x) ++start[std::popcount(prefix ^ x) + 1];
  for (std::uint32_t i = 1; i < start.size(); ++i) start[i] += start[i - 1];
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t x = 0; x < n; ++x) order[start[std::popcount(prefix ^ x)]++] = x;
  return order;
}

std::vector<std::uint32_t> rank_entries_by_score(std::span<const double> scores,
                                                 std::optional<std::size_t> needed) {
  std::vector<std::uint32_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0u);
  auto better = [&scores](std::uint32_t a, std::uint32_t b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  if (needed && *needed < order.size()) {
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(*needed),
                      order.end(), better);
  } else {
    std::sort(order.begin(), order.end(), better);
  }
  return order;
}

std::vector<Neighbor> rerank(BitCodeView query, const CodeSet& codes,
                             std::span<const std::uint32_t> candidates, std::uint32_t k) {
  check_k(k);
  // (distance, id) packed so one integer compare gives the total order.
  std::vector<std::uint64_t> keys(candidates.size());
  const std::size_t w = codes.words_per_code();
  const std::uint64_t* base = codes.raw().data();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const std::uint32_t id = candidates[i];
    const std::uint32_t dist = hamming_words(query.words.data(), base + std::size_t{id} * w, w);
    keys[i] = (std::uint64_t{dist} << 32) | id;
  }
  const std::size_t top = std::min<std::size_t>(k, keys.size());
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(top), keys.end());
  std::vector<Neighbor> out(top);
  for (std::size_t i = 0; i < top; ++i) {
    out[i] = {static_cast<std::uint32_t>(keys[i] & 0xFFFFFFFFu),
              static_cast<std::uint32_t>(keys[i] >> 32)};
  }
  return out;
}

SearchResult search_exhaustive(const Query& q, const ReferenceDataset& refs, std::uint32_t k) {
  check_k(k);
  check_code(q, refs);
  auto start = Clock::now();
  std::vector<std::uint32_t> all(refs.size());
  std::iota(all.begin(), all.end(), 0u);
  SearchResult result;
  result.neighbors = rerank(q.code, refs.codes, all, k);
  result.candidates_examined = refs.size();
  result.timings.rerank_ms = ms_since(start);
  return result;
}

SearchResult search_naive(const Query& q, const InvertedIndex& index,
                          const ReferenceDataset& refs, std::uint32_t k,
                          CandidateBudget budget) {
  check_k(k);
  check_code(q, refs);
  check_index(index, refs);
  SearchResult result;
  auto start = Clock::now();
  const auto ranked = rank_entries_by_prefix(index_prefix(q.code, index.d()), index.d());
  result.scores_ranked = ranked.size();
  result.timings.rank_ms = ms_since(start);
  return finish(q, index, refs, ranked, k, budget, std::move(result));
}

SearchResult search_dnn(const Query& q, const PredictorModel& model,
                        const InvertedIndex& index, const ReferenceDataset& refs,
                        std::uint32_t k, CandidateBudget budget) {
  check_k(k);
  check_code(q, refs);
  check_index(index, refs);
  check_compatible(model, index);
  SearchResult result;
  auto start = Clock::now();
  const auto scores = forward(model, q.features);
  result.timings.predict_ms = ms_since(start);

  start = Clock::now();
  const auto ranked = rank_entries_by_score(scores, sorted_prefix_needed(budget, scores.size()));
  result.scores_ranked = scores.size();
  result.timings.rank_ms = ms_since(start);
  return finish(q, index, refs, ranked, k, budget, std::move(result));
}

SearchResult search_one(const Query& q, const SearchContext& ctx, const SearchPlan& plan) {
  if (!ctx.refs) throw InvalidArgument("search: no reference dataset");
  switch (plan.method) {
    case Method::kExhaustive:
      return search_exhaustive(q, *ctx.refs, plan.k);
    case Method::kNaive:
      if (!ctx.index) throw InvalidArgument("naive-index search needs an index");
      return search_naive(q, *ctx.index, *ctx.refs, plan.k, plan.budget);
    case Method::kDnn:
      if (!ctx.index || !ctx.model) {
        throw InvalidArgument("dnn-index search needs an index and a model");
      }
      return search_dnn(q, *ctx.model, *ctx.index, *ctx.refs, plan.k, plan.budget);
  }
  throw InvalidArgument("unknown search method");
}

std::vector<SearchResult> search_batch(const QuerySet& queries, const SearchContext& ctx,
                                       const SearchPlan& plan) {
  // Validate once up front so worker threads never throw.
  if (queries.size() > 0) search_one(queries.at(0), ctx, plan);
  std::vector<SearchResult> results(queries.size());
  const auto n = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto q = static_cast<std::size_t>(i);
    results[q] = search_one(queries.at(q), ctx, plan);
  }
  return results;
}

std::vector<SearchResult> search_batch_serial(const QuerySet& queries,
                                              const SearchContext& ctx,
                                              const SearchPlan& plan) {
  std::vector<SearchResult> results;
  results.reserve(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    results.push_back(search_one(queries.at(q), ctx, plan));
  }
  return results;
}

}  // namespace hashprobe
