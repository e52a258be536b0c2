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

#include "roomecho/sim.hpp"

namespace roomecho {
namespace {

void BM_ImageSources(benchmark::State& state) {
  const Room room = make_shoebox(Vec3(6, 5, 3), 0.2);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_image_sources(room, Vec3(1, 2, 1.5), order));
}
BENCHMARK(BM_ImageSources)->DenseRange(2, 8, 2);

void BM_SimulateShoebox(benchmark::State& state) {
  const Room room = make_shoebox(Vec3(6, 5, 3), 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_rir(room, Vec3(1, 2, 1.5), Vec3(4.5, 3.2, 1.1)));
  }
}
BENCHMARK(BM_SimulateShoebox)->Unit(benchmark::kMillisecond);

void BM_SimulateLShape(benchmark::State& state) {
  const Room room =
      make_polygonal_room({{0, 0}, {6, 0}, {6, 3}, {3, 3}, {3, 5}, {0, 5}}, 3.0, std::vector<double>(8, 0.2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_rir(room, Vec3(5, 1, 1.5), Vec3(1, 4, 1.5)));
  }
}
BENCHMARK(BM_SimulateLShape)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace roomecho
