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

#include <cmath>
#include <random>
#include <string>

#include "hashprobe/errors.hpp"

namespace hashprobe {

namespace {

using Matrix = std::vector<double>;  // row-major

Matrix gaussian_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                       double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows * cols);
  for (double& v : m) v = dist(rng);
  return m;
}

// Linear view of the latent plus isotropic noise, rounded to float.
std::vector<float> project(std::mt19937_64& rng, const Matrix& map, std::uint32_t out_dim,
                           std::span<const double> latent, double noise) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<float> out(out_dim);
  for (std::uint32_t o = 0; o < out_dim; ++o) {
    double acc = 0.0;
    for (std::size_t g = 0; g < latent.size(); ++g) acc += map[o * latent.size() + g] * latent[g];
    out[o] = static_cast<float>(acc + noise * dist(rng));
  }
  return out;
}

struct Point {
  LabelSet labels;
  std::vector<double> latent;
};

Point draw_point(std::mt19937_64& rng, const SynthConfig& cfg, const Matrix& centers) {
  std::vector<std::uint32_t> pool(cfg.num_labels);
  for (std::uint32_t l = 0; l < cfg.num_labels; ++l) pool[l] = l;
  // Partial Fisher-Yates: the first m slots become the point's labels.
  for (std::uint32_t i = 0; i < cfg.labels_per_point; ++i) {
    std::uniform_int_distribution<std::uint32_t> pick(i, cfg.num_labels - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  std::vector<std::uint32_t> chosen(pool.begin(), pool.begin() + cfg.labels_per_point);

  Point p;
  p.latent.assign(cfg.latent_dim, 0.0);
  for (std::uint32_t l : chosen) {
    for (std::uint32_t g = 0; g < cfg.latent_dim; ++g) {
      p.latent[g] += centers[std::size_t{l} * cfg.latent_dim + g];
    }
  }
  std::normal_distribution<double> noise(0.0, 1.0);
  for (double& v : p.latent) {
    v = v / static_cast<double>(chosen.size()) + cfg.sigma * noise(rng);
  }
  p.labels = LabelSet(std::move(chosen));
  return p;
}

}  // namespace

void SynthConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidArgument("synthetic config: " + what); };
  if (num_reference < 1) fail("N must be >= 1");
  if (num_eval_queries < 1) fail("query count must be >= 1");
  if (num_train_queries > num_reference) fail("more training queries than reference points");
  if (num_labels < 2) fail("L must be >= 2");
  if (image_dim < 1 || text_dim < 1 || latent_dim < 1) fail("dimensions must be >= 1");
  if (code_bits < 1 || code_bits > kMaxCodeBits) fail("code length outside [1, 512]");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) fail("sigma must be finite and >= 0");
  if (!(modality_noise >= 0.0) || !std::isfinite(modality_noise)) {
    fail("modality noise must be finite and >= 0");
  }
  if (labels_per_point < 1 || labels_per_point > num_labels) {
    fail("labels per point outside [1, L]");
  }
}

BitCode surrogate_hash(std::span<const double> latent, const Hyperplanes& planes) {
  if (latent.size() != planes.dim || planes.count() == 0) {
    throw InvalidArgument("surrogate_hash: latent dimension " + std::to_string(latent.size()) +
                          " != hyperplane dimension " + std::to_string(planes.dim));
  }
  BitCode code(planes.count());
  for (std::uint32_t j = 0; j < planes.count(); ++j) {
    const auto normal = planes.normal(j);
    double dot = 0.0;
    for (std::size_t g = 0; g < latent.size(); ++g) dot += latent[g] * normal[g];
    if (dot >= 0.0) code.set_bit(j, true);
  }
  return code;
}

SyntheticData generate(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const Matrix centers = gaussian_matrix(rng, cfg.num_labels, cfg.latent_dim, 1.0);
  SyntheticData data;
  data.planes.dim = cfg.latent_dim;
  data.planes.normals = gaussian_matrix(rng, cfg.code_bits, cfg.latent_dim, 1.0);
  const double map_scale = 1.0 / std::sqrt(static_cast<double>(cfg.latent_dim));
  const Matrix image_map = gaussian_matrix(rng, cfg.image_dim, cfg.latent_dim, map_scale);
  const Matrix text_map = gaussian_matrix(rng, cfg.text_dim, cfg.latent_dim, map_scale);

  auto& ref = data.reference;
  ref.codes = CodeSet(cfg.code_bits);
  ref.codes.reserve(cfg.num_reference);
  ref.features = FeatureMatrix(cfg.image_dim);
  FeatureMatrix ref_text(cfg.text_dim);
  for (std::uint32_t i = 0; i < cfg.num_reference; ++i) {
    Point p = draw_point(rng, cfg, centers);
    ref.codes.push_back(surrogate_hash(p.latent, data.planes));
    ref.features.push_back(project(rng, image_map, cfg.image_dim, p.latent, cfg.modality_noise));
    ref_text.push_back(project(rng, text_map, cfg.text_dim, p.latent, cfg.modality_noise));
    ref.labels.push_back(std::move(p.labels));
  }

  data.eval.features = FeatureMatrix(cfg.text_dim);
  data.eval.codes = CodeSet(cfg.code_bits);
  for (std::uint32_t i = 0; i < cfg.num_eval_queries; ++i) {
    Point p = draw_point(rng, cfg, centers);
    data.eval.codes.push_back(surrogate_hash(p.latent, data.planes));
    data.eval.features.push_back(project(rng, text_map, cfg.text_dim, p.latent, cfg.modality_noise));
    data.eval.labels.push_back(std::move(p.labels));
  }

  // Training queries: a uniform sample of reference points without replacement.
  std::vector<std::uint32_t> ids(cfg.num_reference);
  for (std::uint32_t i = 0; i < cfg.num_reference; ++i) ids[i] = i;
  for (std::uint32_t i = 0; i < cfg.num_train_queries; ++i) {
    std::uniform_int_distribution<std::uint32_t> pick(i, cfg.num_reference - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  ids.resize(cfg.num_train_queries);
  data.train.features = FeatureMatrix(cfg.text_dim);
  data.train.codes = CodeSet(cfg.code_bits);
  for (std::uint32_t id : ids) {
    data.train.features.push_back(ref_text.row(id));
    data.train.codes.push_back(ref.codes[id]);
    data.train.labels.push_back(ref.labels[id]);
  }
  data.train_source_ids = std::move(ids);
  return data;
}

}  // namespace hashprobe
