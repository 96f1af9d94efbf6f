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

// Serial reference vs OpenMP kernel for each parallel hot path. Thread count
// follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <map>
#include <string>

#include "hashprobe/datagen.hpp"
#include "hashprobe/inverted_index.hpp"
#include "hashprobe/predictor.hpp"
#include "hashprobe/relevance.hpp"
#include "hashprobe/search.hpp"

namespace hashprobe {
namespace {

const SyntheticData& dataset(std::uint32_t n) {
  static std::map<std::uint32_t, SyntheticData> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    SynthConfig cfg;
    cfg.num_reference = n;
    cfg.num_train_queries = 512;
    cfg.num_eval_queries = 256;
    cfg.code_bits = 64;
    cfg.num_labels = 20;
    it = cache.emplace(n, generate(cfg)).first;
  }
  return it->second;
}

template <auto Kernel>
void BM_HammingScan(benchmark::State& state) {
  const auto& data = dataset(static_cast<std::uint32_t>(state.range(0)));
  std::vector<std::uint32_t> out(data.reference.size());
  const auto query = data.eval.codes.at(0);
  for (auto _ : state) {
    Kernel(query, data.reference.codes, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.size()));
}
BENCHMARK(BM_HammingScan<hamming_scan_serial>)->Name("hamming_scan/serial")->Arg(20000)->Arg(200000);
BENCHMARK(BM_HammingScan<hamming_scan>)->Name("hamming_scan/parallel")->Arg(20000)->Arg(200000);

template <auto Kernel>
void BM_BuildIndex(benchmark::State& state) {
  const auto& data = dataset(static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(data.reference.codes, 14));
}
BENCHMARK(BM_BuildIndex<build_index_serial>)->Name("build_index/serial")->Arg(200000);
BENCHMARK(BM_BuildIndex<build_index>)->Name("build_index/parallel")->Arg(200000);

template <auto Kernel>
void BM_Targets(benchmark::State& state) {
  const auto& data = dataset(20000);
  const auto index = build_index(data.reference.codes, 10);
  for (auto _ : state)
    benchmark::DoNotOptimize(Kernel(data.train.labels, index, data.reference.labels));
}
BENCHMARK(BM_Targets<compute_targets_batch_serial>)->Name("compute_targets_batch/serial");
BENCHMARK(BM_Targets<compute_targets_batch>)->Name("compute_targets_batch/parallel");

template <auto Kernel>
void BM_Search(benchmark::State& state) {
  const auto& data = dataset(20000);
  const auto index = build_index(data.reference.codes, 10);
  const auto model = PredictorModel::initialized(data.eval.features.dim(), 10, 1);
  const SearchContext ctx{&data.reference, &index, &model};
  const SearchPlan plan{static_cast<Method>(state.range(0)), 50,
                        CandidateBudget::min_candidates(200)};
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(data.eval, ctx, plan));
  state.SetLabel(std::string(method_name(plan.method)));
}
BENCHMARK(BM_Search<search_batch_serial>)
    ->Name("search_batch/serial")
    ->Arg(static_cast<int>(Method::kDnn))
    ->Arg(static_cast<int>(Method::kExhaustive));
BENCHMARK(BM_Search<search_batch>)
    ->Name("search_batch/parallel")
    ->Arg(static_cast<int>(Method::kDnn))
    ->Arg(static_cast<int>(Method::kExhaustive));

template <auto Kernel>
void BM_BatchGradient(benchmark::State& state) {
  const auto& data = dataset(20000);
  const auto index = build_index(data.reference.codes, 10);
  const auto targets = compute_targets_batch(data.train.labels, index, data.reference.labels);
  std::vector<TrainingSample> samples;
  for (std::size_t q = 0; q < targets.size(); ++q) {
    if (targets[q].total_relevant() == 0) continue;
    samples.push_back({data.train.features.row_as_double(q), normalize_targets(targets[q])});
  }
  const auto model = PredictorModel::initialized(data.train.features.dim(), 10, 1);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(model, samples));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples.size()));
}
BENCHMARK(BM_BatchGradient<batch_gradient_serial>)->Name("batch_gradient/serial");
BENCHMARK(BM_BatchGradient<batch_gradient>)->Name("batch_gradient/parallel");

}  // namespace
}  // namespace hashprobe

BENCHMARK_MAIN();
