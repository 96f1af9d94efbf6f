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

// Brute-force reference implementations used only by tests. Each works from
// first principles (unpacked digits, direct formula evaluation) and shares no
// code path with the library routine it checks.

#include <algorithm>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "hashprobe/bitcode.hpp"
#include "hashprobe/relevance.hpp"

namespace hashprobe::oracle {

using Digits = std::vector<std::uint8_t>;

inline Digits random_digits(std::mt19937_64& rng, std::uint32_t c) {
  Digits d(c);
  for (auto& v : d) v = static_cast<std::uint8_t>(rng() & 1u);
  return d;
}

inline std::uint32_t hamming(const Digits& a, const Digits& b) {
  std::uint32_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i] ? 1 : 0;
  return n;
}

/// First d digits read as a binary numeral, digit 0 most significant.
inline std::uint32_t prefix_value(const Digits& digits, std::uint32_t d) {
  std::uint32_t v = 0;
  for (std::uint32_t j = 0; j < d; ++j) v = v * 2 + digits[j];
  return v;
}

inline bool shares_label(const LabelSet& a, const LabelSet& b) {
  for (auto x : a.labels()) {
    for (auto y : b.labels()) {
      if (x == y) return true;
    }
  }
  return false;
}

/// Relevance targets by definition: for every entry value X, scan all points.
inline std::vector<double> naive_targets(const LabelSet& query,
                                         const std::vector<Digits>& codes,
                                         const std::vector<LabelSet>& labels,
                                         std::uint32_t d) {
  std::vector<double> scores(std::size_t{1} << d, 0.0);
  for (std::uint32_t x = 0; x < scores.size(); ++x) {
    std::uint32_t members = 0, relevant = 0;
    for (std::size_t i = 0; i < codes.size(); ++i) {
      if (prefix_value(codes[i], d) != x) continue;
      ++members;
      if (shares_label(query, labels[i])) ++relevant;
    }
    scores[x] = members == 0 ? 0.0 : static_cast<double>(relevant) / members;
  }
  return scores;
}

/// AP@R from its definition: precision of the top j items, recounted for
/// every j, times rel(j), averaged over R slots.
inline double naive_ap(const std::vector<bool>& rel_of_retrieved, std::uint32_t r) {
  double sum = 0.0;
  for (std::uint32_t j = 1; j <= r; ++j) {
    const bool rel_j = j <= rel_of_retrieved.size() && rel_of_retrieved[j - 1];
    if (!rel_j) continue;
    std::uint32_t hits = 0;
    for (std::uint32_t i = 1; i <= j; ++i) {
      if (i <= rel_of_retrieved.size() && rel_of_retrieved[i - 1]) ++hits;
    }
    sum += static_cast<double>(hits) / j;
  }
  return sum / r;
}

/// All (distance, id) pairs sorted ascending, truncated to k.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> brute_knn(
    const Digits& query, const std::vector<Digits>& refs, std::size_t k) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> all;
  for (std::uint32_t i = 0; i < refs.size(); ++i) all.emplace_back(hamming(query, refs[i]), i);
  std::sort(all.begin(), all.end());
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace hashprobe::oracle
