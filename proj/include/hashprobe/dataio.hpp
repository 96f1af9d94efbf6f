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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hashprobe/dataset.hpp"
#include "hashprobe/inverted_index.hpp"

namespace hashprobe {

// Binary formats are little-endian: 4-byte magic, u32 version (= 1), then a
// format-specific header and body. Every loader checks the declared sizes
// against the file length before reading the body and throws FormatError
// naming the file and byte offset.

/// "HPBC": N u64, c u32, then N records of ceil(c/8) bytes, bit position j in
/// byte j/8 at bit j%8.
void save_codes(const CodeSet& codes, const std::filesystem::path& path);
CodeSet load_codes(const std::filesystem::path& path);

/// Text, one line per point: space-separated label ids, empty line for an
/// empty set.
void save_labels(std::span<const LabelSet> labels, const std::filesystem::path& path);
std::vector<LabelSet> load_labels(const std::filesystem::path& path);

/// "HPFV": N u64, F u32, then N x F float32.
void save_features(const FeatureMatrix& features, const std::filesystem::path& path);
FeatureMatrix load_features(const std::filesystem::path& path);

/// "HPIX": d u32, N u64, 2^d u32 entry lengths, then the concatenated ids.
void save_index(const InvertedIndex& index, const std::filesystem::path& path);
InvertedIndex load_index(const std::filesystem::path& path);

/// Paths are stored relative to the manifest's directory.
struct SplitFiles {
  std::string codes;
  std::string labels;
  std::string features;
  std::uint64_t count = 0;
};

/// Flat key=value text file describing a generated or imported dataset.
struct DatasetManifest {
  std::uint32_t code_bits = 0;
  /// Query-modality feature dimension (the predictor's F).
  std::uint32_t query_dim = 0;
  SplitFiles reference;
  SplitFiles train;
  SplitFiles eval;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& relative) const {
    return base_dir / relative;
  }
};

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

struct LoadedDataset {
  DatasetManifest manifest;
  ReferenceDataset reference;
  QuerySet train;
  QuerySet eval;
};

/// Loads every file a manifest names and cross-checks N, c and F. Throws
/// ConsistencyError on any disagreement.
LoadedDataset load_dataset(const std::filesystem::path& manifest_path);

}  // namespace hashprobe
