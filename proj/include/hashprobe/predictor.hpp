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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hashprobe/inverted_index.hpp"

namespace hashprobe {

/// Dense query-modality feature vector.
using FeatureVector = std::vector<double>;

/// Fully-connected F -> F -> F -> 2^d network: two ReLU hidden layers as wide
/// as the input, softmax over index entries at the output.
///
/// All parameters live in one flat vector laid out as W1, b1, W2, b2, W3, b3.
/// Each W is row-major with one row per output unit (out x in), so W1 and W2
/// are F x F and W3 is 2^d x F. This is also the on-disk order.
class PredictorModel {
 public:
  PredictorModel() = default;

  /// All weights and biases zero; the output is uniform for every input.
  static PredictorModel zeros(std::uint32_t feature_dim, std::uint32_t index_bits);
  /// Weights uniform in +-gain * sqrt(6 / (fan_in + fan_out)), biases zero.
  static PredictorModel initialized(std::uint32_t feature_dim, std::uint32_t index_bits,
                                    std::uint64_t seed, double gain = 1.0);

  std::uint32_t feature_dim() const { return feature_dim_; }
  std::uint32_t index_bits() const { return index_bits_; }
  std::size_t num_outputs() const { return std::size_t{1} << index_bits_; }
  std::size_t num_parameters() const { return params_.size(); }

  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }

  struct LayerView {
    std::span<const double> weights;  // out x in, row-major
    std::span<const double> bias;
    std::size_t in = 0;
    std::size_t out = 0;
  };
  /// layer 0..2
  LayerView layer(int i) const;
  /// Offset of layer i's weights within parameters(); its bias follows them.
  std::size_t layer_offset(int i) const;

  friend bool operator==(const PredictorModel&, const PredictorModel&) = default;

 private:
  PredictorModel(std::uint32_t feature_dim, std::uint32_t index_bits);

  std::uint32_t feature_dim_ = 0;
  std::uint32_t index_bits_ = 0;
  std::vector<double> params_;
};

/// Entry probabilities for one query. Throws InvalidArgument on a dimension
/// mismatch or non-finite input.
std::vector<double> forward(const PredictorModel& model, std::span<const double> x);

inline constexpr double kLogClamp = 1e-12;

/// -sum_X target[X] * log(pred[X] + 1e-12).
double cross_entropy(std::span<const double> pred, std::span<const double> target);

/// One training pair: query features and a normalized target distribution.
struct TrainingSample {
  FeatureVector features;
  std::vector<double> target;
};

enum class Optimizer { kAdam, kSgdMomentum };

struct TrainConfig {
  double learning_rate = 1e-3;
  std::uint32_t batch_size = 64;
  std::uint32_t epochs = 100;
  Optimizer optimizer = Optimizer::kAdam;
  double momentum = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Seeds the per-epoch shuffle; shuffle = false keeps the given order.
  std::uint64_t seed = 42;
  bool shuffle = true;

  /// Throws InvalidArgument for out-of-range hyperparameters.
  void validate() const;
};

struct TrainResult {
  PredictorModel model;
  /// Mean per-sample loss of each epoch, measured before each batch update.
  std::vector<double> loss_trace;
};

/// Mini-batch backprop on cross-entropy. Batch gradients are accumulated over
/// fixed 8-sample chunks in parallel and reduced in chunk order, so results do
/// not depend on the thread count. Throws TrainingDiverged on a non-finite
/// loss or gradient.
TrainResult train(PredictorModel model, std::span<const TrainingSample> samples,
                  const TrainConfig& cfg);

/// Gradient of cross_entropy(forward(model, x), target) w.r.t. parameters(),
/// in the same layout.
std::vector<double> loss_gradient(const PredictorModel& model, const TrainingSample& sample);

/// Sum of per-sample gradients over `samples`, OpenMP-parallel with the fixed
/// chunked reduction used by train().
std::vector<double> batch_gradient(const PredictorModel& model,
                                   std::span<const TrainingSample> samples);
/// Serial reference: accumulates samples one by one in order.
std::vector<double> batch_gradient_serial(const PredictorModel& model,
                                          std::span<const TrainingSample> samples);

/// Smallest |pre-activation| over both hidden layers for input x. Gradient
/// checks should keep this well away from 0 (the ReLU kink).
double min_abs_preactivation(const PredictorModel& model, std::span<const double> x);

/// Max relative error between loss_gradient and central finite differences
/// (step 1e-5). Relative error is |a - n| / max(|a|, |n|, 1e-5).
double gradient_check(const PredictorModel& model, const TrainingSample& sample);

/// Throws DimensionMismatch when the model's d differs from the index's.
void check_compatible(const PredictorModel& model, const InvertedIndex& index);

void save_model(const PredictorModel& model, const std::filesystem::path& path);
PredictorModel load_model(const std::filesystem::path& path);

}  // namespace hashprobe
