// Copyright 2026 The attrib-sanity Authors.
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

#include <benchmark/benchmark.h>

#include "attrib/attribution.h"
#include "attrib/metrics.h"
#include "attrib/network.h"
#include "attrib/rng.h"

namespace attrib {
namespace {

Tensor Image(std::uint64_t seed) {
  Rng rng(seed);
  Tensor t({kImageRows, kImageCols});
  for (float& v : t.values()) v = rng.Uniform() < 0.8 ? 0.0f : static_cast<float>(rng.Uniform());
  return t;
}

void BM_ForwardBackward(benchmark::State& state) {
  const Network<float> net(InitializeModel(1));
  const auto batch = static_cast<std::size_t>(state.range(0));
  std::vector<Tensor> images;
  for (std::size_t i = 0; i < batch; ++i) images.push_back(Image(i));
  const auto inputs = PackImages<float>(images);
  Network<float>::Workspace ws;
  Network<float>::Matrix dlogits = Network<float>::Matrix::Zero(inputs.rows(), kNumClasses);
  dlogits.col(3).setOnes();
  for (auto _ : state) {
    net.Forward(inputs, ws);
    benchmark::DoNotOptimize(net.InputGradient(ws, dlogits).data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_ForwardBackward)->Arg(1)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_IntegratedGradients(benchmark::State& state) {
  const NetworkScorer scorer(InitializeModel(1));
  const Tensor x = Image(7);
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(IntegratedGradients(scorer, x, BlackBaseline(), 3, steps).raw_sum);
  }
}
BENCHMARK(BM_IntegratedGradients)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_Spearman(benchmark::State& state) {
  Rng rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = i % 5 == 0 ? 0.0 : rng.Normal();
    b[i] = i % 5 == 0 ? 0.0 : rng.Normal();
  }
  for (auto _ : state) benchmark::DoNotOptimize(Spearman(a, b));
}
BENCHMARK(BM_Spearman)->Arg(784)->Arg(1 << 14);

void BM_TrainingStep(benchmark::State& state) {
  const ModelCheckpoint model = InitializeModel(1);
  ImageSet data;
  for (std::size_t i = 0; i < 64; ++i) {
    data.images.push_back(Image(i));
    data.labels.push_back(static_cast<std::uint8_t>(i % 10));
  }
  TrainConfig config;
  config.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(Train(data, config).layers.size());
}
BENCHMARK(BM_TrainingStep)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace attrib

BENCHMARK_MAIN();
