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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "hashprobe/binary_io.hpp"
#include "hashprobe/errors.hpp"

namespace hashprobe {

namespace {

constexpr std::size_t kGradChunk = 8;
// Chunks whose buffers are live at once; fixed so the reduction tree does not
// depend on the thread count.
constexpr std::size_t kChunksPerWave = 32;

struct ForwardCache {
  std::vector<double> z1, h1, z2, h2, probs;
};

void dense(const PredictorModel::LayerView& layer, std::span<const double> in,
           std::vector<double>& out) {
  out.resize(layer.out);
  for (std::size_t o = 0; o < layer.out; ++o) {
    const double* row = layer.weights.data() + o * layer.in;
    double acc = layer.bias[o];
    for (std::size_t i = 0; i < layer.in; ++i) acc += row[i] * in[i];
    out[o] = acc;
  }
}

void relu(const std::vector<double>& z, std::vector<double>& h) {
  h.resize(z.size());
  // NaN passes through so overflow surfaces as a non-finite loss.
  for (std::size_t i = 0; i < z.size(); ++i) h[i] = z[i] > 0.0 || std::isnan(z[i]) ? z[i] : 0.0;
}

void softmax_inplace(std::vector<double>& v) {
  const double max = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - max);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

void check_input(const PredictorModel& model, std::span<const double> x) {
  if (model.num_parameters() == 0) throw InvalidArgument("forward: empty model");
  if (x.size() != model.feature_dim()) {
    throw InvalidArgument("forward: input dimension " + std::to_string(x.size()) +
                          " != F = " + std::to_string(model.feature_dim()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw InvalidArgument("forward: non-finite input");
  }
}

void forward_cached(const PredictorModel& model, std::span<const double> x,
                    ForwardCache& cache) {
  dense(model.layer(0), x, cache.z1);
  relu(cache.z1, cache.h1);
  dense(model.layer(1), cache.h1, cache.z2);
  relu(cache.z2, cache.h2);
  dense(model.layer(2), cache.h2, cache.probs);
  softmax_inplace(cache.probs);
}

// Adds d loss / d params for one sample into `grad`. `scratch` vectors are
// reused across calls.
void backward_accumulate(const PredictorModel& model, const TrainingSample& sample,
                         ForwardCache& cache, std::vector<double>& dz3,
                         std::vector<double>& dh, std::vector<double>& dz,
                         std::span<double> grad, double* loss_out) {
  forward_cached(model, sample.features, cache);
  const auto& p = cache.probs;
  const auto& t = sample.target;
  if (loss_out) *loss_out = cross_entropy(p, t);

  // Exact softmax + clamped-log chain rule; reduces to p - t when the clamp
  // is negligible and t sums to 1.
  dz3.resize(p.size());
  double weighted = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    dz3[k] = t[k] == 0.0 ? 0.0 : -t[k] / (p[k] + kLogClamp);
    weighted += dz3[k] * p[k];
  }
  for (std::size_t k = 0; k < p.size(); ++k) dz3[k] = p[k] * (dz3[k] - weighted);

  const std::span<const double> inputs[3] = {sample.features, cache.h1, cache.h2};
  const std::vector<double>* pre[3] = {&cache.z1, &cache.z2, nullptr};

  // Layers 2, 1, 0; `upstream` holds d loss / d pre-activation of the layer.
  std::vector<double>* upstream = &dz3;
  for (int l = 2; l >= 0; --l) {
    const auto layer = model.layer(l);
    const std::size_t off = model.layer_offset(l);
    double* gw = grad.data() + off;
    double* gb = gw + layer.in * layer.out;
    const auto in = inputs[l];
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double g = (*upstream)[o];
      gb[o] += g;
      if (g == 0.0) continue;
      double* row = gw + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) row[i] += g * in[i];
    }
    if (l == 0) break;
    dh.assign(layer.in, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double g = (*upstream)[o];
      if (g == 0.0) continue;
      const double* row = layer.weights.data() + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) dh[i] += row[i] * g;
    }
    const auto& z = *pre[l - 1];
    dz.resize(layer.in);
    for (std::size_t i = 0; i < layer.in; ++i) dz[i] = z[i] > 0.0 ? dh[i] : 0.0;
    std::swap(dz3, dz);
    upstream = &dz3;
  }
}

struct GradWorkspace {
  ForwardCache cache;
  std::vector<double> dz3, dh, dz;
};

// Sums gradients of samples[idx[b]] for b in [begin, end) into `grad`, and
// writes per-sample losses into losses[b - begin] when provided.
void accumulate_range(const PredictorModel& model, std::span<const TrainingSample> samples,
                      std::span<const std::size_t> order, std::span<double> grad,
                      std::span<double> losses) {
  GradWorkspace ws;
  for (std::size_t b = 0; b < order.size(); ++b) {
    double loss = 0.0;
    backward_accumulate(model, samples[order[b]], ws.cache, ws.dz3, ws.dh, ws.dz, grad,
                        &loss);
    if (!losses.empty()) losses[b] = loss;
  }
}

// Chunked parallel reduction: chunk c covers order[c*8, c*8+8), chunks are
// summed serially into `total` in ascending c.
void chunked_gradient(const PredictorModel& model, std::span<const TrainingSample> samples,
                      std::span<const std::size_t> order, std::vector<double>& total,
                      std::span<double> losses) {
  const std::size_t n_params = model.num_parameters();
  total.assign(n_params, 0.0);
  const std::size_t n_chunks = (order.size() + kGradChunk - 1) / kGradChunk;
  std::vector<std::vector<double>> buffers(std::min(n_chunks, kChunksPerWave));
  for (std::size_t wave = 0; wave < n_chunks; wave += kChunksPerWave) {
    const std::size_t in_wave = std::min(kChunksPerWave, n_chunks - wave);
    const auto n_signed = static_cast<std::int64_t>(in_wave);
#pragma omp parallel for schedule(static)
    for (std::int64_t w = 0; w < n_signed; ++w) {
      const std::size_t c = wave + static_cast<std::size_t>(w);
      const std::size_t begin = c * kGradChunk;
      const std::size_t end = std::min(order.size(), begin + kGradChunk);
      auto& buf = buffers[static_cast<std::size_t>(w)];
      buf.assign(n_params, 0.0);
      accumulate_range(model, samples, order.subspan(begin, end - begin), buf,
                       losses.empty() ? losses : losses.subspan(begin, end - begin));
    }
    for (std::size_t w = 0; w < in_wave; ++w) {
      for (std::size_t p = 0; p < n_params; ++p) total[p] += buffers[w][p];
    }
  }
}

void check_samples(const PredictorModel& model, std::span<const TrainingSample> samples) {
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& sample = samples[s];
    if (sample.features.size() != model.feature_dim() ||
        sample.target.size() != model.num_outputs()) {
      throw InvalidArgument("training sample " + std::to_string(s) +
                            " does not match the model dimensions");
    }
    for (double v : sample.features) {
      if (!std::isfinite(v)) {
        throw InvalidArgument("training sample " + std::to_string(s) +
                              " has non-finite features");
      }
    }
  }
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

PredictorModel::PredictorModel(std::uint32_t feature_dim, std::uint32_t index_bits)
    : feature_dim_(feature_dim), index_bits_(index_bits) {
  if (feature_dim < 1) throw InvalidArgument("predictor: feature dimension must be >= 1");
  if (index_bits < 1 || index_bits > kMaxIndexBits) {
    throw InvalidArgument("predictor: d = " + std::to_string(index_bits) +
                          " outside [1, 24]");
  }
  const std::size_t f = feature_dim;
  params_.assign(2 * (f * f + f) + num_outputs() * f + num_outputs(), 0.0);
}

PredictorModel PredictorModel::zeros(std::uint32_t feature_dim, std::uint32_t index_bits) {
  return PredictorModel(feature_dim, index_bits);
}

PredictorModel PredictorModel::initialized(std::uint32_t feature_dim,
                                           std::uint32_t index_bits, std::uint64_t seed,
                                           double gain) {
  PredictorModel model(feature_dim, index_bits);
  std::mt19937_64 rng(seed);
  for (int l = 0; l < 3; ++l) {
    const auto view = model.layer(l);
    const double limit =
        gain * std::sqrt(6.0 / static_cast<double>(view.in + view.out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    double* w = model.params_.data() + model.layer_offset(l);
    for (std::size_t i = 0; i < view.in * view.out; ++i) w[i] = dist(rng);
  }
  return model;
}

std::size_t PredictorModel::layer_offset(int i) const {
  const std::size_t f = feature_dim_;
  return static_cast<std::size_t>(i) * (f * f + f);
}

PredictorModel::LayerView PredictorModel::layer(int i) const {
  const std::size_t f = feature_dim_;
  const std::size_t out = i == 2 ? num_outputs() : f;
  const std::size_t off = layer_offset(i);
  const std::span<const double> all(params_);
  return {all.subspan(off, out * f), all.subspan(off + out * f, out), f, out};
}

std::vector<double> forward(const PredictorModel& model, std::span<const double> x) {
  check_input(model, x);
  ForwardCache cache;
  forward_cached(model, x, cache);
  return std::move(cache.probs);
}

double cross_entropy(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) {
    throw InvalidArgument("cross_entropy: length " + std::to_string(pred.size()) +
                          " != " + std::to_string(target.size()));
  }
  double loss = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    if (target[k] != 0.0) loss -= target[k] * std::log(pred[k] + kLogClamp);
  }
  return loss;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("learning rate must be finite and >= 0");
  }
  if (batch_size < 1) throw InvalidArgument("batch size must be >= 1");
  if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidArgument("momentum outside [0, 1)");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw InvalidArgument("Adam betas outside [0, 1)");
  }
  if (!(epsilon > 0.0)) throw InvalidArgument("Adam epsilon must be > 0");
}

TrainResult train(PredictorModel model, std::span<const TrainingSample> samples,
                  const TrainConfig& cfg) {
  cfg.validate();
  if (samples.empty()) throw InvalidArgument("train: no samples");
  check_samples(model, samples);

  const std::size_t n = samples.size();
  const std::size_t n_params = model.num_parameters();
  std::vector<double> first(n_params, 0.0), second(n_params, 0.0), grad;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> batch_losses(std::min<std::size_t>(cfg.batch_size, n));
  std::vector<double> sample_loss(n);
  std::mt19937_64 rng(cfg.seed);
  std::uint64_t step = 0;

  TrainResult result;
  result.loss_trace.reserve(cfg.epochs);
  for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
    std::size_t batch_no = 0;
    for (std::size_t begin = 0; begin < n; begin += cfg.batch_size, ++batch_no) {
      const std::size_t end = std::min(n, begin + cfg.batch_size);
      const auto batch = std::span<const std::size_t>(order).subspan(begin, end - begin);
      const auto losses = std::span<double>(batch_losses).first(batch.size());
      chunked_gradient(model, samples, batch, grad, losses);

      for (std::size_t b = 0; b < batch.size(); ++b) sample_loss[batch[b]] = losses[b];
      const double scale = 1.0 / static_cast<double>(batch.size());
      for (double& g : grad) g *= scale;
      if (!all_finite(losses) || !all_finite(grad)) {
        throw TrainingDiverged("training diverged at epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(batch_no));
      }

      ++step;
      auto params = model.parameters();
      if (cfg.optimizer == Optimizer::kAdam) {
        const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
        for (std::size_t p = 0; p < n_params; ++p) {
          first[p] = cfg.beta1 * first[p] + (1.0 - cfg.beta1) * grad[p];
          second[p] = cfg.beta2 * second[p] + (1.0 - cfg.beta2) * grad[p] * grad[p];
          const double m_hat = first[p] / c1;
          const double v_hat = second[p] / c2;
          params[p] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
        }
      } else {
        for (std::size_t p = 0; p < n_params; ++p) {
          first[p] = cfg.momentum * first[p] + grad[p];
          params[p] -= cfg.learning_rate * first[p];
        }
      }
      if (!all_finite(params)) {
        throw TrainingDiverged("parameters became non-finite at epoch " +
                               std::to_string(epoch) + ", batch " + std::to_string(batch_no));
      }
    }
    // Summed in sample-index order so the trace does not depend on the shuffle.
    double total = 0.0;
    for (double l : sample_loss) total += l;
    result.loss_trace.push_back(total / static_cast<double>(n));
  }
  result.model = std::move(model);
  return result;
}

std::vector<double> loss_gradient(const PredictorModel& model, const TrainingSample& sample) {
  check_input(model, sample.features);
  if (sample.target.size() != model.num_outputs()) {
    throw InvalidArgument("loss_gradient: target length != 2^d");
  }
  std::vector<double> grad(model.num_parameters(), 0.0);
  GradWorkspace ws;
  backward_accumulate(model, sample, ws.cache, ws.dz3, ws.dh, ws.dz, grad, nullptr);
  return grad;
}

std::vector<double> batch_gradient(const PredictorModel& model,
                                   std::span<const TrainingSample> samples) {
  check_samples(model, samples);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> total;
  chunked_gradient(model, samples, order, total, {});
  return total;
}

std::vector<double> batch_gradient_serial(const PredictorModel& model,
                                          std::span<const TrainingSample> samples) {
  check_samples(model, samples);
  std::vector<double> total(model.num_parameters(), 0.0);
  for (const auto& sample : samples) {
    const auto g = loss_gradient(model, sample);
    for (std::size_t p = 0; p < total.size(); ++p) total[p] += g[p];
  }
  return total;
}

double min_abs_preactivation(const PredictorModel& model, std::span<const double> x) {
  check_input(model, x);
  ForwardCache cache;
  forward_cached(model, x, cache);
  double m = std::numeric_limits<double>::infinity();
  for (double z : cache.z1) m = std::min(m, std::abs(z));
  for (double z : cache.z2) m = std::min(m, std::abs(z));
  return m;
}

double gradient_check(const PredictorModel& model, const TrainingSample& sample) {
  constexpr double kStep = 1e-5;
  constexpr double kFloor = 1e-5;
  const auto analytic = loss_gradient(model, sample);
  PredictorModel probe = model;
  auto params = probe.parameters();
  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double saved = params[p];
    params[p] = saved + kStep;
    const double up = cross_entropy(forward(probe, sample.features), sample.target);
    params[p] = saved - kStep;
    const double down = cross_entropy(forward(probe, sample.features), sample.target);
    params[p] = saved;
    const double numeric = (up - down) / (2.0 * kStep);
    const double denom = std::max({std::abs(analytic[p]), std::abs(numeric), kFloor});
    worst = std::max(worst, std::abs(analytic[p] - numeric) / denom);
  }
  return worst;
}

void check_compatible(const PredictorModel& model, const InvertedIndex& index) {
  if (model.index_bits() != index.d()) {
    throw DimensionMismatch("model was trained for d = " +
                            std::to_string(model.index_bits()) + " but the index has d = " +
                            std::to_string(index.d()));
  }
}

void save_model(const PredictorModel& model, const std::filesystem::path& path) {
  io::ByteWriter out;
  out.magic("HPNN");
  out.u32(1);
  out.u32(model.feature_dim());
  out.u32(model.index_bits());
  for (double v : model.parameters()) out.f64(v);
  out.save(path);
}

PredictorModel load_model(const std::filesystem::path& path) {
  auto in = io::ByteReader::open(path);
  in.expect_magic("HPNN");
  in.expect_version(1);
  const std::uint32_t f = in.u32();
  const std::uint32_t d = in.u32();
  if (f < 1 || f > (1u << 16)) in.fail("feature dimension " + std::to_string(f) + " out of range");
  if (d < 1 || d > kMaxIndexBits) in.fail("index width " + std::to_string(d) + " out of range");
  PredictorModel model = PredictorModel::zeros(f, d);
  in.expect_remaining(model.num_parameters() * 8, "parameter block");
  for (double& v : model.parameters()) v = in.f64();
  if (!all_finite(model.parameters())) in.fail("non-finite parameter");
  return model;
}

}  // namespace hashprobe
