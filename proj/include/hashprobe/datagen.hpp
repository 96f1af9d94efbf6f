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

#include "hashprobe/dataset.hpp"

namespace hashprobe {

/// Parameters of the synthetic cross-modal generator.
struct SynthConfig {
  std::uint32_t num_reference = 1000;
  std::uint32_t num_train_queries = 500;
  std::uint32_t num_eval_queries = 100;
  std::uint32_t num_labels = 5;
  std::uint32_t image_dim = 32;
  std::uint32_t text_dim = 32;
  std::uint32_t latent_dim = 16;
  std::uint32_t code_bits = 16;
  /// Latent noise around the label centers.
  double sigma = 0.3;
  /// Distinct labels drawn per point.
  std::uint32_t labels_per_point = 1;
  /// Noise added to each modality's linear view of the latent.
  double modality_noise = 0.1;
  std::uint64_t seed = 1;

  void validate() const;
};

/// c sign-random-projection hyperplanes over a latent space, row-major c x G.
struct Hyperplanes {
  std::uint32_t dim = 0;
  std::vector<double> normals;

  std::uint32_t count() const {
    return dim == 0 ? 0 : static_cast<std::uint32_t>(normals.size() / dim);
  }
  std::span<const double> normal(std::uint32_t j) const {
    return std::span<const double>(normals).subspan(std::size_t{j} * dim, dim);
  }
};

/// Bit j is 1 iff dot(latent, normal j) >= 0.
BitCode surrogate_hash(std::span<const double> latent, const Hyperplanes& planes);

/// Reference points carry image features and codes; training queries are a
/// sample of reference points seen through their text features; evaluation
/// queries are fresh points seen through text.
struct SyntheticData {
  ReferenceDataset reference;
  QuerySet train;
  QuerySet eval;
  Hyperplanes planes;
  /// Reference ids the training queries were drawn from.
  std::vector<std::uint32_t> train_source_ids;
};

/// Deterministic given cfg.seed.
SyntheticData generate(const SynthConfig& cfg);

}  // namespace hashprobe
