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

#include "hashprobe/dataset.hpp"

#include <string>

#include "hashprobe/errors.hpp"

namespace hashprobe {

FeatureMatrix::FeatureMatrix(std::uint32_t dim, std::vector<float> values)
    : dim_(dim), values_(std::move(values)) {
  if (dim_ == 0 || values_.size() % dim_ != 0) {
    throw InvalidArgument("feature matrix size is not a multiple of F = " +
                          std::to_string(dim_));
  }
}

std::vector<double> FeatureMatrix::row_as_double(std::size_t i) const {
  const auto r = row(i);
  return std::vector<double>(r.begin(), r.end());
}

void FeatureMatrix::push_back(std::span<const float> row) {
  if (row.size() != dim_) {
    throw InvalidArgument("feature row of width " + std::to_string(row.size()) +
                          " != F = " + std::to_string(dim_));
  }
  values_.insert(values_.end(), row.begin(), row.end());
}

Query QuerySet::at(std::size_t i) const {
  if (i >= size()) throw InvalidArgument("query id " + std::to_string(i) + " out of range");
  Query q;
  q.features = features.row_as_double(i);
  if (!codes.empty()) q.code = codes.at(i);
  q.labels = labels[i];
  return q;
}

}  // namespace hashprobe
