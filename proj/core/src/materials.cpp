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

#include "roomecho/materials.hpp"

#include <algorithm>
#include <set>

#include "roomecho/error.hpp"

namespace roomecho {

MaterialLibrary::MaterialLibrary(std::vector<Material> materials)
    : materials_(std::move(materials)) {
  std::set<std::string> seen;
  for (const auto& m : materials_) {
    require(m.absorption > 0.0 && m.absorption <= 1.0, ErrorCode::kConfig,
            "material " + m.id + " absorption outside (0, 1]");
    require(seen.insert(m.id).second, ErrorCode::kConfig, "duplicate material " + m.id);
  }
}

std::vector<std::string> MaterialLibrary::categories() const {
  std::vector<std::string> out;
  for (const auto& m : materials_) {
    if (std::find(out.begin(), out.end(), m.category) == out.end()) out.push_back(m.category);
  }
  return out;
}

const Material& MaterialLibrary::get(std::string_view id) const {
  for (const auto& m : materials_) {
    if (m.id == id) return m;
  }
  fail(ErrorCode::kConfig, "unknown material " + std::string(id));
}

bool MaterialLibrary::contains(std::string_view id) const {
  return std::any_of(materials_.begin(), materials_.end(),
                     [&](const Material& m) { return m.id == id; });
}

const Material& MaterialLibrary::sample(Rng& rng) const {
  return materials_[rng.index(materials_.size())];
}

const MaterialLibrary& default_material_library() {
  // Broadband values roughly at the 500 Hz-1 kHz octave of common tables.
  static const MaterialLibrary lib({
      {"concrete_painted", "concrete", 0.05},
      {"concrete_rough", "concrete", 0.08},
      {"concrete_block", "concrete", 0.12},
      {"concrete_floor", "concrete", 0.03},
      {"brick_glazed", "brick", 0.04},
      {"brick_unglazed", "brick", 0.06},
      {"brick_painted", "brick", 0.05},
      {"brick_hollow", "brick", 0.14},
      {"plaster_smooth", "plaster", 0.05},
      {"plaster_lath", "plaster", 0.10},
      {"gypsum_board", "plaster", 0.08},
      {"plaster_acoustic", "plaster", 0.35},
      {"wood_floor", "wood", 0.10},
      {"wood_panel", "wood", 0.18},
      {"plywood_thin", "wood", 0.22},
      {"wood_parquet", "wood", 0.07},
      {"glass_window", "glass", 0.12},
      {"glass_heavy", "glass", 0.04},
      {"glass_double", "glass", 0.07},
      {"glass_mirror", "glass", 0.03},
      {"tile_ceramic", "tile", 0.02},
      {"tile_marble", "tile", 0.01},
      {"tile_vinyl", "tile", 0.04},
      {"tile_linoleum", "tile", 0.05},
      {"carpet_thin", "carpet", 0.25},
      {"carpet_heavy", "carpet", 0.50},
      {"carpet_underlay", "carpet", 0.60},
      {"carpet_tiles", "carpet", 0.35},
      {"curtain_light", "curtain", 0.30},
      {"curtain_medium", "curtain", 0.45},
      {"curtain_heavy", "curtain", 0.65},
      {"curtain_velour", "curtain", 0.75},
      {"panel_foam", "acoustic_panel", 0.80},
      {"panel_fiberglass", "acoustic_panel", 0.90},
      {"panel_mineral", "acoustic_panel", 0.70},
      {"panel_perforated", "acoustic_panel", 0.55},
      {"metal_sheet", "metal", 0.10},
      {"metal_perforated", "metal", 0.40},
      {"metal_corrugated", "metal", 0.15},
      {"metal_deck", "metal", 0.08},
      {"upholstery_seats", "upholstery", 0.60},
      {"upholstery_leather", "upholstery", 0.40},
      {"upholstery_fabric", "upholstery", 0.70},
      {"upholstery_bench", "upholstery", 0.30},
  });
  return lib;
}

}  // namespace roomecho
