// Copyright 2026 The roomecho Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <benchmark/benchmark.h>

#include "model_fixtures.hpp"
#include "roomecho/model.hpp"

namespace roomecho {
namespace {

ModelConfig preset(int which) {
  switch (which) {
    case 0: return ModelConfig::tiny();
    case 1: return ModelConfig::compact();
    default: return ModelConfig::full();
  }
}

void BM_Forward(benchmark::State& state) {
  const ModelConfig cfg = preset(static_cast<int>(state.range(0)));
  const XRir<float> model(cfg, 1);
  const ModelInput in = testing::random_input(cfg, cfg.k, 2);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(in).s_pred.value());
  state.SetLabel(std::to_string(model.parameter_count()) + " parameters");
}
BENCHMARK(BM_Forward)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_TrainingGradient(benchmark::State& state) {
  const ModelConfig cfg = preset(static_cast<int>(state.range(0)));
  XRir<float> model(cfg, 1);
  std::vector<TrainingExample> batch{{testing::random_input(cfg, cfg.k, 3), testing::random_target(cfg, 4)}};
  for (auto _ : state) benchmark::DoNotOptimize(gradients(model, std::span<const TrainingExample>(batch)).total);
}
BENCHMARK(BM_TrainingGradient)->DenseRange(0, 1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace roomecho
