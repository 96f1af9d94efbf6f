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

#include "hashprobe/datagen.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "hashprobe/errors.hpp"
#include "hashprobe/inverted_index.hpp"

namespace hashprobe {
namespace {

SynthConfig small(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.num_reference = 400;
  cfg.num_train_queries = 100;
  cfg.num_eval_queries = 50;
  cfg.seed = seed;
  return cfg;
}

TEST(Generate, ShapesMatchConfig) {
  auto cfg = small(3);
  cfg.image_dim = 7;
  cfg.text_dim = 5;
  cfg.code_bits = 70;
  cfg.labels_per_point = 2;
  const auto data = generate(cfg);
  EXPECT_EQ(data.reference.size(), 400u);
  EXPECT_EQ(data.reference.codes.length(), 70u);
  EXPECT_EQ(data.reference.features.dim(), 7u);
  EXPECT_EQ(data.reference.features.rows(), 400u);
  EXPECT_EQ(data.train.size(), 100u);
  EXPECT_EQ(data.train.features.dim(), 5u);
  EXPECT_EQ(data.train.codes.size(), 100u);
  EXPECT_EQ(data.eval.size(), 50u);
  EXPECT_EQ(data.eval.codes.size(), 50u);
  EXPECT_EQ(data.eval.features.rows(), 50u);
  for (const auto& l : data.reference.labels) {
    EXPECT_EQ(l.size(), 2u);
    for (auto v : l.labels()) EXPECT_LT(v, cfg.num_labels);
  }
  std::set<std::uint32_t> distinct(data.train_source_ids.begin(), data.train_source_ids.end());
  EXPECT_EQ(distinct.size(), 100u);
}

TEST(Generate, TrainQueriesMirrorTheirSourcePoints) {
  const auto data = generate(small(4));
  for (std::size_t j = 0; j < data.train.size(); ++j) {
    const auto src = data.train_source_ids[j];
    ASSERT_EQ(data.train.labels[j], data.reference.labels[src]);
    ASSERT_EQ(data.train.codes.at(j), data.reference.codes.at(src));
  }
}

TEST(Generate, DeterministicPerSeed) {
  const auto a = generate(small(9));
  const auto b = generate(small(9));
  const auto c = generate(small(10));
  EXPECT_EQ(a.reference, b.reference);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.eval, b.eval);
  EXPECT_NE(a.reference.codes.raw().front(), c.reference.codes.raw().front());
}

TEST(Generate, NoiselessSingleLabelPointsShareOneEntry) {
  auto cfg = small(5);
  cfg.sigma = 0.0;
  cfg.num_labels = 6;
  const auto data = generate(cfg);
  const auto index = build_index(data.reference.codes, 8);
  std::map<std::uint32_t, std::set<std::uint32_t>> entries_of_label;
  for (std::uint32_t x = 0; x < index.num_entries(); ++x)
    for (auto id : index.entry(x)) entries_of_label[data.reference.labels[id].labels()[0]].insert(x);
  for (const auto& [label, entries] : entries_of_label) EXPECT_EQ(entries.size(), 1u) << label;
}

TEST(Generate, SameLabelCodesAreCloser) {
  auto cfg = small(6);
  cfg.sigma = 0.1;
  cfg.code_bits = 16;
  cfg.num_labels = 10;
  cfg.num_reference = 1000;
  const auto data = generate(cfg);
  const auto& refs = data.reference;
  double intra = 0.0, inter = 0.0;
  std::size_t n_intra = 0, n_inter = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    for (std::size_t j = i + 1; j < refs.size(); j += 7) {
      const double h = hamming_distance(refs.codes[i], refs.codes[j]);
      if (refs.labels[i] == refs.labels[j]) {
        intra += h;
        ++n_intra;
      } else {
        inter += h;
        ++n_inter;
      }
    }
  }
  ASSERT_GT(n_intra, 0u);
  EXPECT_LT(intra / n_intra, inter / n_inter);
}

TEST(SurrogateHash, SignOfProjections) {
  Hyperplanes planes{2, {1, 0, 0, 1, -1, -1}};
  EXPECT_EQ(surrogate_hash(std::vector<double>{1.0, -2.0}, planes).unpack(),
            (std::vector<std::uint8_t>{1, 0, 1}));
  EXPECT_EQ(surrogate_hash(std::vector<double>{0.0, 0.0}, planes).unpack(),
            (std::vector<std::uint8_t>{1, 1, 1}));
  EXPECT_THROW(surrogate_hash(std::vector<double>{1.0}, planes), InvalidArgument);
}

TEST(SurrogateHash, ScaleInvariantAndNegationFlipsOffBoundary) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  Hyperplanes planes;
  planes.dim = 6;
  for (int i = 0; i < 6 * 40; ++i) planes.normals.push_back(g(rng));
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(6), scaled(6), neg(6);
    for (int i = 0; i < 6; ++i) {
      v[i] = g(rng);
      scaled[i] = 3.5 * v[i];
      neg[i] = -v[i];
    }
    const auto h = surrogate_hash(v, planes);
    ASSERT_EQ(h, surrogate_hash(scaled, planes));
    ASSERT_EQ(hamming_distance(h, surrogate_hash(neg, planes)), 40u);
  }
}

TEST(SynthConfig, RejectsBadValues) {
  auto bad = [](auto mutate) {
    SynthConfig cfg;
    mutate(cfg);
    return cfg;
  };
  EXPECT_THROW(generate(bad([](SynthConfig& c) { c.num_reference = 0; })), InvalidArgument);
  EXPECT_THROW(generate(bad([](SynthConfig& c) { c.num_labels = 1; })), InvalidArgument);
  EXPECT_THROW(generate(bad([](SynthConfig& c) { c.code_bits = 513; })), InvalidArgument);
  EXPECT_THROW(generate(bad([](SynthConfig& c) { c.sigma = -1; })), InvalidArgument);
  EXPECT_THROW(generate(bad([](SynthConfig& c) { c.labels_per_point = 6; })), InvalidArgument);
  EXPECT_THROW(generate(bad([](SynthConfig& c) { c.num_train_queries = 2000; })),
               InvalidArgument);
}

}  // namespace
}  // namespace hashprobe
