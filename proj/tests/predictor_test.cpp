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

#include "hashprobe/predictor.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "hashprobe/errors.hpp"

namespace hashprobe {
namespace {

double entropy(const std::vector<double>& t) {
  double h = 0.0;
  for (double v : t) {
    if (v > 0) h -= v * std::log(v);
  }
  return h;
}

std::vector<double> random_input(std::mt19937_64& rng, std::size_t f) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(f);
  for (auto& v : x) v = n(rng);
  return x;
}

std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t k) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> t(k);
  for (auto& v : t) v = u(rng);
  const double s = std::accumulate(t.begin(), t.end(), 0.0);
  for (auto& v : t) v /= s;
  return t;
}

void randomize(PredictorModel& model, std::mt19937_64& rng, double scale = 0.8) {
  std::uniform_real_distribution<double> u(-scale, scale);
  for (double& p : model.parameters()) p = u(rng);
}

TEST(Forward, ZeroModelIsUniform) {
  const auto model = PredictorModel::zeros(5, 3);
  const auto p = forward(model, std::vector<double>{1, -2, 3, 0.5, 9});
  ASSERT_EQ(p.size(), 8u);
  for (double v : p) EXPECT_DOUBLE_EQ(v, 1.0 / 8.0);
}

TEST(Forward, SoftmaxNormalization) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = 1 + static_cast<std::uint32_t>(rng() % 8);
    const auto d = 1 + static_cast<std::uint32_t>(rng() % 6);
    auto model = PredictorModel::initialized(f, d, rng(), 3.0);
    const auto p = forward(model, random_input(rng, f));
    double sum = 0.0;
    for (double v : p) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
      sum += v;
    }
    ASSERT_NEAR(sum, 1.0, 1e-9);
  }
}

// F = 2, d = 2: parameters W1(2x2) b1(2) W2(2x2) b2(2) W3(4x2) b3(4).
TEST(Forward, MatchesStraightLineOracle) {
  auto model = PredictorModel::initialized(2, 2, 2024);
  std::mt19937_64 rng(99);
  randomize(model, rng);
  const auto w = model.parameters();
  ASSERT_EQ(w.size(), 24u);
  const double x0 = 1.0, x1 = -1.0;

  const double a0 = std::max(0.0, w[0] * x0 + w[1] * x1 + w[4]);
  const double a1 = std::max(0.0, w[2] * x0 + w[3] * x1 + w[5]);
  const double b0 = std::max(0.0, w[6] * a0 + w[7] * a1 + w[10]);
  const double b1 = std::max(0.0, w[8] * a0 + w[9] * a1 + w[11]);
  double logits[4];
  for (int k = 0; k < 4; ++k) logits[k] = w[12 + 2 * k] * b0 + w[13 + 2 * k] * b1 + w[20 + k];
  double denom = 0.0;
  for (double l : logits) denom += std::exp(l);

  const auto p = forward(model, std::vector<double>{x0, x1});
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(p[k], std::exp(logits[k]) / denom, 1e-12);
}

TEST(Forward, RejectsBadInput) {
  const auto model = PredictorModel::zeros(3, 2);
  EXPECT_THROW(forward(model, std::vector<double>{1, 2}), InvalidArgument);
  EXPECT_THROW(forward(model, std::vector<double>{1, NAN, 2}), InvalidArgument);
  EXPECT_THROW(forward(model, std::vector<double>{1, INFINITY, 2}), InvalidArgument);
}

TEST(PredictorModel, ArchitectureShape) {
  const auto model = PredictorModel::initialized(6, 4, 1);
  EXPECT_EQ(model.layer(0).in, 6u);
  EXPECT_EQ(model.layer(0).out, 6u);
  EXPECT_EQ(model.layer(1).out, 6u);
  EXPECT_EQ(model.layer(2).out, 16u);
  EXPECT_EQ(model.num_parameters(), 2 * (36 + 6) + 16 * 6 + 16u);
  for (int l = 0; l < 3; ++l) {
    const auto view = model.layer(l);
    const double limit = std::sqrt(6.0 / static_cast<double>(view.in + view.out));
    for (double v : view.weights) EXPECT_LE(std::abs(v), limit);
    for (double v : view.bias) EXPECT_EQ(v, 0.0);
  }
  EXPECT_THROW(PredictorModel::zeros(4, 25), InvalidArgument);
  EXPECT_THROW(PredictorModel::zeros(0, 2), InvalidArgument);
}

TEST(CrossEntropy, Examples) {
  const std::vector<double> uniform(4, 0.25);
  EXPECT_NEAR(cross_entropy(uniform, uniform), std::log(4.0), 1e-9);

  const std::vector<double> sure = {1.0, 0.0, 0.0, 0.0};
  EXPECT_NEAR(cross_entropy(sure, sure), 0.0, 1e-11);

  const std::vector<double> pred = {1.0, 0.0, 0.0, 0.0};
  const std::vector<double> off = {0.0, 1.0, 0.0, 0.0};
  const double loss = cross_entropy(pred, off);
  EXPECT_TRUE(std::isfinite(loss));
  EXPECT_NEAR(loss, -std::log(kLogClamp), 1e-9);

  EXPECT_THROW(cross_entropy(uniform, std::span<const double>(sure).first(3)), InvalidArgument);
}

TEST(GradientCheck, SeededSmallModels) {
  std::mt19937_64 rng(7);
  int checked = 0;
  while (checked < 20) {
    auto model = PredictorModel::initialized(4, 2, rng());
    randomize(model, rng);
    TrainingSample sample{random_input(rng, 4), random_distribution(rng, 4)};
    if (min_abs_preactivation(model, sample.features) < 1e-3) continue;
    EXPECT_LT(gradient_check(model, sample), 1e-4);
    ++checked;
  }
}

TEST(GradientCheck, StationaryWhenTargetEqualsPrediction) {
  std::mt19937_64 rng(8);
  auto model = PredictorModel::initialized(4, 2, 5);
  randomize(model, rng);
  TrainingSample sample{random_input(rng, 4), {}};
  sample.target = forward(model, sample.features);
  const auto g = loss_gradient(model, sample);
  double norm = 0.0;
  for (double v : g) norm += v * v;
  EXPECT_LT(std::sqrt(norm), 1e-8);
}

TEST(BatchGradient, ParallelMatchesSerial) {
  std::mt19937_64 rng(12);
  auto model = PredictorModel::initialized(6, 3, 3);
  std::vector<TrainingSample> samples;
  for (int i = 0; i < 77; ++i) samples.push_back({random_input(rng, 6), random_distribution(rng, 8)});
  const auto par = batch_gradient(model, samples);
  const auto ser = batch_gradient_serial(model, samples);
  ASSERT_EQ(par.size(), ser.size());
  for (std::size_t p = 0; p < par.size(); ++p) {
    EXPECT_NEAR(par[p], ser[p], 1e-12 * std::max(1.0, std::abs(ser[p])));
  }
  EXPECT_EQ(par, batch_gradient(model, samples));
}

TEST(Train, SingleSampleReachesEntropyBound) {
  std::mt19937_64 rng(21);
  const std::vector<TrainingSample> samples = {{random_input(rng, 4), {0.5, 0.3, 0.2, 0.0}}};
  TrainConfig cfg;
  cfg.learning_rate = 1e-2;
  cfg.epochs = 3000;
  cfg.batch_size = 1;
  const auto result = train(PredictorModel::initialized(4, 2, 3), samples, cfg);
  ASSERT_EQ(result.loss_trace.size(), 3000u);
  const double final_loss =
      cross_entropy(forward(result.model, samples[0].features), samples[0].target);
  EXPECT_NEAR(final_loss, entropy(samples[0].target), 1e-3);
}

TEST(Train, ZeroLearningRateLeavesModelUnchanged) {
  std::mt19937_64 rng(22);
  std::vector<TrainingSample> samples;
  for (int i = 0; i < 40; ++i) samples.push_back({random_input(rng, 4), random_distribution(rng, 4)});
  const auto model = PredictorModel::initialized(4, 2, 9);
  for (Optimizer opt : {Optimizer::kAdam, Optimizer::kSgdMomentum}) {
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    cfg.epochs = 5;
    cfg.batch_size = 16;
    cfg.optimizer = opt;
    const auto result = train(model, samples, cfg);
    EXPECT_EQ(result.model, model);
    for (double l : result.loss_trace) EXPECT_EQ(l, result.loss_trace.front());
  }
}

TEST(Train, SeededRunsAreIdentical) {
  std::mt19937_64 rng(23);
  std::vector<TrainingSample> samples;
  for (int i = 0; i < 100; ++i) samples.push_back({random_input(rng, 5), random_distribution(rng, 8)});
  TrainConfig cfg;
  cfg.epochs = 8;
  cfg.batch_size = 10;
  cfg.learning_rate = 1e-2;
  const auto a = train(PredictorModel::initialized(5, 3, 1), samples, cfg);
  const auto b = train(PredictorModel::initialized(5, 3, 1), samples, cfg);
  EXPECT_EQ(a.loss_trace, b.loss_trace);
  EXPECT_EQ(a.model, b.model);
}

TEST(Train, FullBatchIsOrderInvariant) {
  std::mt19937_64 rng(24);
  std::vector<TrainingSample> samples;
  for (int i = 0; i < 50; ++i) samples.push_back({random_input(rng, 4), random_distribution(rng, 4)});
  auto permuted = samples;
  std::shuffle(permuted.begin(), permuted.end(), rng);
  TrainConfig cfg;
  cfg.optimizer = Optimizer::kSgdMomentum;
  cfg.learning_rate = 0.05;
  cfg.batch_size = 50;
  cfg.epochs = 30;
  cfg.shuffle = false;
  const auto a = train(PredictorModel::initialized(4, 2, 2), samples, cfg);
  const auto b = train(PredictorModel::initialized(4, 2, 2), permuted, cfg);
  const auto pa = a.model.parameters();
  const auto pb = b.model.parameters();
  for (std::size_t p = 0; p < pa.size(); ++p) ASSERT_NEAR(pa[p], pb[p], 1e-12);
}

// Two well-separated query clusters, each concentrated in its own entry.
TEST(Train, SeparableClustersApproachTargetEntropy) {
  std::mt19937_64 rng(25);
  std::normal_distribution<double> noise(0.0, 0.3);
  const std::vector<double> target_a = {0.85, 0.05, 0.05, 0.05};
  const std::vector<double> target_b = {0.05, 0.05, 0.05, 0.85};
  std::vector<TrainingSample> samples;
  for (int i = 0; i < 200; ++i) {
    const double sign = i % 2 == 0 ? 1.0 : -1.0;
    std::vector<double> x = {3 * sign + noise(rng), 3 * sign + noise(rng), noise(rng), noise(rng)};
    samples.push_back({x, i % 2 == 0 ? target_a : target_b});
  }
  TrainConfig cfg;
  cfg.learning_rate = 1e-2;
  cfg.epochs = 200;
  cfg.batch_size = 32;
  const auto result = train(PredictorModel::initialized(4, 2, 4), samples, cfg);
  EXPECT_LE(result.loss_trace.back(), 1.1 * entropy(target_a));
}

TEST(Train, DivergenceIsReported) {
  // Finite inputs whose pre-activations overflow to inf and then NaN.
  const std::vector<TrainingSample> samples = {
      {{1e308, 1e308, 1e308}, {0.25, 0.25, 0.25, 0.25}}};
  auto model = PredictorModel::zeros(3, 2);
  for (double& p : model.parameters()) p = 1.0;
  TrainConfig cfg;
  cfg.epochs = 2;
  try {
    train(model, samples, cfg);
    FAIL() << "expected TrainingDiverged";
  } catch (const TrainingDiverged& e) {
    EXPECT_NE(std::string(e.what()).find("epoch 0, batch 0"), std::string::npos) << e.what();
  }
}

TEST(Train, RejectsBadConfigAndSamples) {
  const auto model = PredictorModel::zeros(3, 2);
  std::vector<TrainingSample> samples = {{{1, 2, 3}, {0.25, 0.25, 0.25, 0.25}}};
  TrainConfig cfg;
  cfg.batch_size = 0;
  EXPECT_THROW(train(model, samples, cfg), InvalidArgument);
  cfg = TrainConfig{};
  EXPECT_THROW(train(model, {}, cfg), InvalidArgument);
  samples[0].features = {1, 2};
  EXPECT_THROW(train(model, samples, cfg), InvalidArgument);
}

class ModelFileTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("hashprobe_model_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(ModelFileTest, RoundTripIsBitExact) {
  std::mt19937_64 rng(30);
  std::vector<TrainingSample> samples;
  for (int i = 0; i < 30; ++i) samples.push_back({random_input(rng, 5), random_distribution(rng, 8)});
  TrainConfig cfg;
  cfg.epochs = 3;
  const auto trained = train(PredictorModel::initialized(5, 3, 8), samples, cfg).model;
  save_model(trained, dir_ / "m.hpnn");
  const auto loaded = load_model(dir_ / "m.hpnn");
  EXPECT_EQ(loaded, trained);
  for (int i = 0; i < 100; ++i) {
    const auto x = random_input(rng, 5);
    ASSERT_EQ(forward(loaded, x), forward(trained, x));
  }
}

TEST_F(ModelFileTest, CorruptMagicAndTruncation) {
  save_model(PredictorModel::initialized(3, 2, 1), dir_ / "m.hpnn");
  std::vector<char> bytes;
  {
    std::ifstream in(dir_ / "m.hpnn", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto write = [&](const std::vector<char>& b) {
    std::ofstream out(dir_ / "bad.hpnn", std::ios::binary | std::ios::trunc);
    out.write(b.data(), static_cast<std::streamsize>(b.size()));
  };
  auto corrupt = bytes;
  corrupt[0] = 'X';
  write(corrupt);
  EXPECT_THROW(load_model(dir_ / "bad.hpnn"), FormatError);
  write(std::vector<char>(bytes.begin(), bytes.end() - 1));
  EXPECT_THROW(load_model(dir_ / "bad.hpnn"), FormatError);
  auto version = bytes;
  version[4] = 2;
  write(version);
  EXPECT_THROW(load_model(dir_ / "bad.hpnn"), FormatError);
}

TEST(CheckCompatible, IndexWidthMismatch) {
  CodeSet codes(8);
  codes.push_back(BitCode(8));
  const auto index = build_index(codes, 3);
  EXPECT_NO_THROW(check_compatible(PredictorModel::zeros(2, 3), index));
  EXPECT_THROW(check_compatible(PredictorModel::zeros(2, 4), index), DimensionMismatch);
}

}  // namespace
}  // namespace hashprobe
