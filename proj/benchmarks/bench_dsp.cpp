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

#include "roomecho/dsp.hpp"
#include "roomecho/sim.hpp"

namespace roomecho {
namespace {

const std::vector<double>& rir() {
  static const std::vector<double> h =
      simulate_rir(make_shoebox(Vec3(5, 4, 3), 0.3), Vec3(1, 1, 1.2), Vec3(3.5, 2.5, 1.6)).waveform;
  return h;
}

void BM_StftLogMag(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(stft_logmag(rir()));
}
BENCHMARK(BM_StftLogMag);

void BM_InverseStft(benchmark::State& state) {
  Eigen::MatrixXd re, im;
  default_stft().forward(rir(), re, im);
  for (auto _ : state) benchmark::DoNotOptimize(default_stft().inverse(re, im));
}
BENCHMARK(BM_InverseStft);

void BM_GriffinLim(benchmark::State& state) {
  const Eigen::MatrixXd mag = default_stft().magnitude(rir());
  GriffinLimOptions opts;
  opts.iterations = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(griffin_lim(mag, opts));
}
BENCHMARK(BM_GriffinLim)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_Metrics(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(compute_metrics(rir()));
}
BENCHMARK(BM_Metrics);

}  // namespace
}  // namespace roomecho
