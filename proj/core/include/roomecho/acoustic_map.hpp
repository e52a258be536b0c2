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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "roomecho/dataset.hpp"
#include "roomecho/evaluate.hpp"

namespace roomecho {

struct AcousticMapConfig {
  double resolution = 0.5;  // grid spacing in meters
  Method method = Method::kNearest;
  int k = 4;
  std::uint64_t seed = 0;
  bool align = true;
};

struct MapCell {
  double x = 0.0;
  double y = 0.0;
  bool valid = false;
  double c50_pred = 0.0;
  double c50_gt = 0.0;
};

// C50 with the source swept over a horizontal grid at the receiver height.
struct AcousticMap {
  std::string room_id;
  int receiver = 0;
  int nx = 0;
  int ny = 0;
  std::vector<MapCell> cells;  // row-major, y outer
};

// Cells that violate the dataset's source placement rules are flagged
// invalid and skipped. Throws kPlacementInfeasible if no cell is valid.
AcousticMap acoustic_map(const Dataset& data, std::size_t room, int receiver,
                         const AcousticMapConfig& cfg, const XRir<float>* model = nullptr);

std::string acoustic_map_csv(const AcousticMap& map);
// Grayscale rendering of the predicted C50 over [-10, 30] dB; invalid cells are black.
void write_acoustic_map_pgm(const AcousticMap& map, const std::filesystem::path& path,
                            bool ground_truth = false);

}  // namespace roomecho
