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

#include "roomecho/geometry.hpp"

namespace roomecho {
namespace {

Room l_room() {
  return make_polygonal_room({{0, 0}, {6, 0}, {6, 3}, {3, 3}, {3, 5}, {0, 5}}, 3.0, std::vector<double>(8, 0.3));
}

void BM_PanoramaShoebox(benchmark::State& state) {
  const Room room = make_shoebox(Vec3(5, 4, 3), 0.3);
  const int h = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_panorama_depth(room, Vec3(2, 1.5, 1.2), h, 2 * h));
  }
  state.SetItemsProcessed(state.iterations() * h * 2 * h);
}
BENCHMARK(BM_PanoramaShoebox)->Arg(64)->Arg(256);

void BM_PanoramaLShape(benchmark::State& state) {
  const Room room = l_room();
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_panorama_depth(room, Vec3(1.5, 3.8, 1.4), 256, 512));
  }
}
BENCHMARK(BM_PanoramaLShape);

void BM_Placement(benchmark::State& state) {
  const Room room = l_room();
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_placements(room, 8, 6, seed++));
}
BENCHMARK(BM_Placement);

}  // namespace
}  // namespace roomecho
