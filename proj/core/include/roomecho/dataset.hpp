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
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "roomecho/geometry.hpp"
#include "roomecho/sim.hpp"

namespace roomecho {

struct SizeRange {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
};

struct RoomCategory {
  std::string name;
  SizeRange size;
};

std::vector<RoomCategory> default_room_categories();

struct GenConfig {
  std::uint64_t seed = 0;
  int rooms_per_category = 5;
  std::vector<RoomCategory> categories = default_room_categories();
  int sources_per_room = 8;
  int receivers_per_room = 6;
  // Negative selects min(10, sources / 2).
  int reference_candidates = -1;
  // Probability that a room gets an L-shaped footprint instead of a box.
  double l_shape_probability = 1.0 / 3.0;
  // Fresh geometry draws allowed when placement fails.
  int resample_budget = 5;
  int panorama_height = kPanoramaHeight;
  int panorama_width = kPanoramaWidth;
  SimConfig sim;
  PlacementRules placement;
};

nlohmann::json to_json(const SimConfig& cfg);
SimConfig sim_config_from_json(const nlohmann::json& j, SimConfig base = {});
nlohmann::json to_json(const GenConfig& cfg);
GenConfig gen_config_from_json(const nlohmann::json& j, GenConfig base = {});

// Everything needed to rebuild a Room exactly.
struct RoomSpec {
  std::string id;
  std::string category;
  std::vector<Vec2> footprint;
  double height = 0.0;
  std::vector<std::string> materials;  // walls in footprint order, floor, ceiling

  Room build() const;
};

nlohmann::json to_json(const RoomSpec& spec);
RoomSpec room_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Placement& p);
Placement placement_from_json(const nlohmann::json& j);

// Draws one room of `category` (geometry and materials) from `seed`.
RoomSpec sample_room_spec(const RoomCategory& category, const std::string& id,
                          double l_shape_probability, std::uint64_t seed);

struct RirIndexEntry {
  std::string room_id;
  int receiver = 0;
  int source = 0;
  std::uint64_t offset = 0;  // bytes into the room's rirs.f32
};

struct RoomEntry {
  std::string id;
  std::string category;
  std::string kind;
  std::string geometry_file;  // paths relative to the dataset root
  std::string placement_file;
  std::string rir_file;
  std::vector<std::string> panorama_files;
  double sabine_t60 = 0.0;
};

struct DatasetManifest {
  int format_version = 1;
  std::uint64_t seed = 0;
  GenConfig gen;
  std::vector<RoomEntry> rooms;
  std::vector<RirIndexEntry> rirs;
  std::vector<std::string> warnings;
};

inline constexpr int kDatasetFormatVersion = 1;

nlohmann::json to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);

// Generates rooms in parallel and writes everything under out_dir.
// Deterministic given gen.seed.
DatasetManifest generate_dataset(const GenConfig& gen, const std::filesystem::path& out_dir);

// Read access to a generated dataset. Waveforms are loaded per room on first
// use; methods are safe to call concurrently.
class Dataset {
 public:
  static Dataset load(const std::filesystem::path& root);

  const std::filesystem::path& root() const { return root_; }
  const DatasetManifest& manifest() const { return manifest_; }
  std::size_t room_count() const { return rooms_.size(); }
  std::size_t room_index(const std::string& id) const;
  const RoomEntry& entry(std::size_t room) const { return manifest_.rooms[room]; }
  const RoomSpec& spec(std::size_t room) const { return rooms_[room]->spec; }
  const Room& room(std::size_t room) const { return rooms_[room]->room; }
  const Placement& placement(std::size_t room) const { return rooms_[room]->placement; }
  const SimConfig& sim() const { return manifest_.gen.sim; }

  std::vector<double> waveform(std::size_t room, int receiver, int source) const;
  RIRRecord record(std::size_t room, int receiver, int source) const;
  PanoramaDepth panorama(std::size_t room, int receiver) const;
  CoordMap coords(std::size_t room, int receiver) const;

 private:
  struct RoomData {
    RoomSpec spec;
    Room room;
    Placement placement;
    std::map<std::pair<int, int>, std::uint64_t> offsets;  // (receiver, source)
    mutable std::once_flag loaded;
    mutable std::vector<float> blob;
  };

  std::filesystem::path root_;
  DatasetManifest manifest_;
  std::vector<std::unique_ptr<RoomData>> rooms_;
};

}  // namespace roomecho
