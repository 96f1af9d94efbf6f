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
#include <span>
#include <vector>

#include "hashprobe/bitcode.hpp"
#include "hashprobe/relevance.hpp"

namespace hashprobe {

/// Row-major N x F matrix of 32-bit features (the on-disk precision).
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(std::uint32_t dim) : dim_(dim) {}
  FeatureMatrix(std::uint32_t dim, std::vector<float> values);

  std::uint32_t dim() const { return dim_; }
  std::size_t rows() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(values_).subspan(i * dim_, dim_);
  }
  /// Row widened to double, the predictor's input precision.
  std::vector<double> row_as_double(std::size_t i) const;
  void push_back(std::span<const float> row);
  std::span<const float> values() const { return values_; }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::uint32_t dim_ = 0;
  std::vector<float> values_;
};

/// The reference set B: N codes with their label sets and, optionally, the
/// reference modality's features.
struct ReferenceDataset {
  CodeSet codes;
  std::vector<LabelSet> labels;
  FeatureMatrix features;

  std::size_t size() const { return codes.size(); }
  friend bool operator==(const ReferenceDataset&, const ReferenceDataset&) = default;
};

/// One query: features of the query modality, its hash code in the shared
/// Hamming space, and labels for offline evaluation.
struct Query {
  std::vector<double> features;
  BitCode code;
  LabelSet labels;
};

/// A batch of queries stored column-wise. `codes` may be empty for training
/// splits, which only need features and labels.
struct QuerySet {
  FeatureMatrix features;
  CodeSet codes;
  std::vector<LabelSet> labels;

  std::size_t size() const { return labels.size(); }
  Query at(std::size_t i) const;
  friend bool operator==(const QuerySet&, const QuerySet&) = default;
};

}  // namespace hashprobe
