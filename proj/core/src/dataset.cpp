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

#include "roomecho/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>

#include "roomecho/error.hpp"
#include "roomecho/io.hpp"
#include "roomecho/materials.hpp"
#include "roomecho/parallel.hpp"
#include "roomecho/random.hpp"

namespace roomecho {

using nlohmann::json;

std::vector<RoomCategory> default_room_categories() {
  return {
      {"bedroom", {Vec3(3.0, 3.0, 2.4), Vec3(5.0, 4.5, 3.0)}},
      {"office", {Vec3(4.0, 4.0, 2.6), Vec3(7.0, 6.0, 3.2)}},
      {"hall", {Vec3(7.0, 6.0, 3.5), Vec3(12.0, 10.0, 5.0)}},
  };
}

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j) {
  require(j.is_array() && j.size() == 3, ErrorCode::kFormat, "expected a 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

// Copies j[key] into field when present; rejects keys outside `known`.
void check_keys(const json& j, const json& known, const std::string& what) {
  require(j.is_object(), ErrorCode::kConfig, what + " must be an object");
  for (const auto& [key, _] : j.items()) {
    require(known.contains(key), ErrorCode::kConfig, "unknown " + what + " key '" + key + "'");
  }
}

template <class F>
void read_field(const json& j, const char* key, F& field) {
  if (j.contains(key)) field = j.at(key).get<F>();
}

json to_json(const PlacementRules& r) {
  return json{{"source_surface_clearance", r.source_surface_clearance},
              {"source_source_distance", r.source_source_distance},
              {"source_receiver_distance", r.source_receiver_distance},
              {"receiver_surface_clearance", r.receiver_surface_clearance},
              {"receiver_source_distance", r.receiver_source_distance},
              {"min_height", r.min_height},
              {"max_height", r.max_height},
              {"attempts_per_point", r.attempts_per_point}};
}

PlacementRules rules_from_json(const json& j, PlacementRules r) {
  check_keys(j, to_json(r), "placement");
  read_field(j, "source_surface_clearance", r.source_surface_clearance);
  read_field(j, "source_source_distance", r.source_source_distance);
  read_field(j, "source_receiver_distance", r.source_receiver_distance);
  read_field(j, "receiver_surface_clearance", r.receiver_surface_clearance);
  read_field(j, "receiver_source_distance", r.receiver_source_distance);
  read_field(j, "min_height", r.min_height);
  read_field(j, "max_height", r.max_height);
  read_field(j, "attempts_per_point", r.attempts_per_point);
  return r;
}

}  // namespace

json to_json(const SimConfig& c) {
  return json{{"sample_rate", c.sample_rate},
              {"rir_length", c.rir_length},
              {"speed_of_sound", c.speed_of_sound},
              {"max_reflection_order", c.max_reflection_order},
              {"tail_enabled", c.tail_enabled},
              {"tail_rays", c.tail_rays},
              {"seed", c.seed},
              {"min_source_receiver_distance", c.min_source_receiver_distance},
              {"min_surface_clearance", c.min_surface_clearance}};
}

SimConfig sim_config_from_json(const json& j, SimConfig c) {
  check_keys(j, to_json(c), "sim");
  try {
    read_field(j, "sample_rate", c.sample_rate);
    read_field(j, "rir_length", c.rir_length);
    read_field(j, "speed_of_sound", c.speed_of_sound);
    read_field(j, "max_reflection_order", c.max_reflection_order);
    read_field(j, "tail_enabled", c.tail_enabled);
    read_field(j, "tail_rays", c.tail_rays);
    read_field(j, "seed", c.seed);
    read_field(j, "min_source_receiver_distance", c.min_source_receiver_distance);
    read_field(j, "min_surface_clearance", c.min_surface_clearance);
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, std::string("sim config: ") + e.what());
  }
  validate(c);
  return c;
}

json to_json(const GenConfig& g) {
  json cats = json::array();
  for (const auto& c : g.categories) {
    cats.push_back({{"name", c.name}, {"min", vec_json(c.size.min)}, {"max", vec_json(c.size.max)}});
  }
  return json{{"seed", g.seed},
              {"rooms_per_category", g.rooms_per_category},
              {"categories", cats},
              {"sources_per_room", g.sources_per_room},
              {"receivers_per_room", g.receivers_per_room},
              {"reference_candidates", g.reference_candidates},
              {"l_shape_probability", g.l_shape_probability},
              {"resample_budget", g.resample_budget},
              {"panorama_height", g.panorama_height},
              {"panorama_width", g.panorama_width},
              {"sim", to_json(g.sim)},
              {"placement", to_json(g.placement)}};
}

GenConfig gen_config_from_json(const json& j, GenConfig g) {
  check_keys(j, to_json(g), "gen");
  try {
    read_field(j, "seed", g.seed);
    read_field(j, "rooms_per_category", g.rooms_per_category);
    read_field(j, "sources_per_room", g.sources_per_room);
    read_field(j, "receivers_per_room", g.receivers_per_room);
    read_field(j, "reference_candidates", g.reference_candidates);
    read_field(j, "l_shape_probability", g.l_shape_probability);
    read_field(j, "resample_budget", g.resample_budget);
    read_field(j, "panorama_height", g.panorama_height);
    read_field(j, "panorama_width", g.panorama_width);
    if (j.contains("categories")) {
      g.categories.clear();
      for (const auto& c : j.at("categories")) {
        g.categories.push_back(
            {c.at("name").get<std::string>(), {vec_from(c.at("min")), vec_from(c.at("max"))}});
      }
    }
    if (j.contains("sim")) g.sim = sim_config_from_json(j.at("sim"), g.sim);
    if (j.contains("placement")) g.placement = rules_from_json(j.at("placement"), g.placement);
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, std::string("gen config: ") + e.what());
  }
  require(g.rooms_per_category >= 1 && !g.categories.empty(), ErrorCode::kConfig,
          "need at least one room category and one room per category");
  require(g.sources_per_room >= 2 && g.receivers_per_room >= 1, ErrorCode::kConfig,
          "need at least two sources and one receiver per room");
  require(g.l_shape_probability >= 0.0 && g.l_shape_probability <= 1.0, ErrorCode::kConfig,
          "l_shape_probability must be in [0, 1]");
  for (const auto& c : g.categories) {
    require((c.size.min.array() > kMinRoomExtent).all() && (c.size.max.array() >= c.size.min.array()).all(),
            ErrorCode::kConfig, "invalid size range for category " + c.name);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Room specs

Room RoomSpec::build() const { return make_polygonal_room(footprint, height, materials, id); }

json to_json(const RoomSpec& s) {
  json fp = json::array();
  for (const auto& v : s.footprint) fp.push_back(json::array({v.x(), v.y()}));
  return json{{"id", s.id},
              {"category", s.category},
              {"footprint", fp},
              {"height", s.height},
              {"materials", s.materials}};
}

RoomSpec room_spec_from_json(const json& j) {
  RoomSpec s;
  try {
    s.id = j.at("id").get<std::string>();
    s.category = j.at("category").get<std::string>();
    for (const auto& v : j.at("footprint")) s.footprint.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    s.height = j.at("height").get<double>();
    s.materials = j.at("materials").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string("room geometry: ") + e.what());
  }
  return s;
}

json to_json(const Placement& p) {
  json src = json::array(), rcv = json::array();
  for (const auto& v : p.sources) src.push_back(vec_json(v));
  for (const auto& v : p.receivers) rcv.push_back(vec_json(v));
  return json{{"sources", src}, {"receivers", rcv}, {"reference_source_indices", p.reference_source_indices}};
}

Placement placement_from_json(const json& j) {
  Placement p;
  try {
    for (const auto& v : j.at("sources")) p.sources.push_back(vec_from(v));
    for (const auto& v : j.at("receivers")) p.receivers.push_back(vec_from(v));
    p.reference_source_indices = j.at("reference_source_indices").get<std::vector<int>>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string("placement: ") + e.what());
  }
  return p;
}

RoomSpec sample_room_spec(const RoomCategory& category, const std::string& id,
                          double l_shape_probability, std::uint64_t seed) {
  Rng rng(seed);
  const Vec3& lo = category.size.min;
  const Vec3& hi = category.size.max;
  const double lx = rng.uniform(lo.x(), hi.x());
  const double ly = rng.uniform(lo.y(), hi.y());
  RoomSpec s;
  s.id = id;
  s.category = category.name;
  s.height = rng.uniform(lo.z(), hi.z());
  if (rng.uniform() < l_shape_probability) {
    // Remove a rectangular notch from the (+x, +y) corner.
    const double nx = lx * rng.uniform(0.35, 0.5);
    const double ny = ly * rng.uniform(0.35, 0.5);
    s.footprint = {{0.0, 0.0}, {lx, 0.0}, {lx, ly - ny}, {lx - nx, ly - ny}, {lx - nx, ly}, {0.0, ly}};
  } else {
    s.footprint = {{0.0, 0.0}, {lx, 0.0}, {lx, ly}, {0.0, ly}};
  }
  const auto& lib = default_material_library();
  for (std::size_t i = 0; i < s.footprint.size() + 2; ++i) s.materials.push_back(lib.sample(rng).id);
  return s;
}

// ---------------------------------------------------------------------------
// Manifest

json to_json(const DatasetManifest& m) {
  json rooms = json::array();
  for (const auto& r : m.rooms) {
    rooms.push_back({{"id", r.id},
                     {"category", r.category},
                     {"kind", r.kind},
                     {"geometry", r.geometry_file},
                     {"placement", r.placement_file},
                     {"rirs", r.rir_file},
                     {"panoramas", r.panorama_files},
                     {"sabine_t60", r.sabine_t60}});
  }
  json index = json::array();
  for (const auto& e : m.rirs) {
    index.push_back({{"room_id", e.room_id}, {"receiver", e.receiver}, {"source", e.source},
                     {"offset", e.offset}});
  }
  return json{{"format_version", m.format_version},
              {"seed", m.seed},
              {"generator", to_json(m.gen)},
              {"sim", to_json(m.gen.sim)},
              {"rooms", rooms},
              {"rir_index", index},
              {"warnings", m.warnings}};
}

DatasetManifest manifest_from_json(const json& j) {
  DatasetManifest m;
  try {
    m.format_version = j.at("format_version").get<int>();
    require(m.format_version == kDatasetFormatVersion, ErrorCode::kFormat,
            "unsupported dataset format version " + std::to_string(m.format_version));
    m.seed = j.at("seed").get<std::uint64_t>();
    m.gen = gen_config_from_json(j.at("generator"));
    for (const auto& r : j.at("rooms")) {
      RoomEntry e;
      e.id = r.at("id").get<std::string>();
      e.category = r.at("category").get<std::string>();
      e.kind = r.at("kind").get<std::string>();
      e.geometry_file = r.at("geometry").get<std::string>();
      e.placement_file = r.at("placement").get<std::string>();
      e.rir_file = r.at("rirs").get<std::string>();
      e.panorama_files = r.at("panoramas").get<std::vector<std::string>>();
      e.sabine_t60 = r.at("sabine_t60").get<double>();
      m.rooms.push_back(std::move(e));
    }
    for (const auto& e : j.at("rir_index")) {
      m.rirs.push_back({e.at("room_id").get<std::string>(), e.at("receiver").get<int>(),
                        e.at("source").get<int>(), e.at("offset").get<std::uint64_t>()});
    }
    m.warnings = j.value("warnings", std::vector<std::string>{});
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string("manifest: ") + e.what());
  }
  std::set<std::tuple<std::string, int, int>> seen;
  for (const auto& e : m.rirs) {
    require(seen.emplace(e.room_id, e.receiver, e.source).second, ErrorCode::kFormat,
            "duplicate rir index entry for room " + e.room_id);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Generation

namespace {

struct GeneratedRoom {
  bool ok = false;
  std::string warning;
  RoomEntry entry;
  std::vector<RirIndexEntry> index;
};

GeneratedRoom generate_room(const GenConfig& gen, const RoomCategory& category, int ordinal,
                            const fs::path& out_dir) {
  GeneratedRoom out;
  char id_buf[64];
  std::snprintf(id_buf, sizeof(id_buf), "%s_%02d", category.name.c_str(), ordinal);
  const std::string id = id_buf;
  std::string last_error;
  for (int attempt = 0; attempt <= gen.resample_budget; ++attempt) {
    const std::uint64_t seed = SeedHasher(gen.seed)
                                   .add(std::string_view("room"))
                                   .add(id)
                                   .add(static_cast<std::uint64_t>(attempt))
                                   .value();
    const RoomSpec spec = sample_room_spec(category, id, gen.l_shape_probability, seed);
    Placement placement;
    try {
      const Room room = spec.build();
      placement = sample_placements(room, gen.sources_per_room, gen.receivers_per_room, seed,
                                    gen.reference_candidates, gen.placement);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kPlacementInfeasible && e.code() != ErrorCode::kInvalidGeometry) throw;
      last_error = e.what();
      continue;
    }
    const Room room = spec.build();
    const fs::path rel = fs::path("rooms") / id;
    const fs::path dir = out_dir / rel;
    fs::create_directories(dir / "panoramas");

    json geometry = to_json(spec);
    geometry["kind"] = std::string(to_string(room.kind()));
    geometry["volume"] = room.volume();
    geometry["surface_area"] = room.surface_area();
    write_json(dir / "geometry.json", geometry);
    write_json(dir / "placement.json", to_json(placement));

    std::ofstream blob(dir / "rirs.f32", std::ios::binary | std::ios::trunc);
    require(blob.good(), ErrorCode::kIo, "cannot write " + (dir / "rirs.f32").string());
    std::uint64_t offset = 0;
    for (int r = 0; r < static_cast<int>(placement.receivers.size()); ++r) {
      for (int s = 0; s < static_cast<int>(placement.sources.size()); ++s) {
        const RIRRecord rec = simulate_rir(room, placement.sources[s], placement.receivers[r], gen.sim);
        out.index.push_back({id, r, s, offset});
        offset += append_f32(blob, std::span<const double>(rec.waveform));
      }
    }
    blob.close();
    require(!blob.fail(), ErrorCode::kIo, "failed writing " + (dir / "rirs.f32").string());

    for (int r = 0; r < static_cast<int>(placement.receivers.size()); ++r) {
      const auto depth = render_panorama_depth(room, placement.receivers[r], gen.panorama_height,
                                               gen.panorama_width);
      const std::string name = std::to_string(r);
      write_f32(dir / "panoramas" / (name + ".f32"), std::span<const double>(depth.values));
      write_json(dir / "panoramas" / (name + ".json"),
                 {{"receiver", vec_json(depth.receiver)},
                  {"height", depth.height},
                  {"width", depth.width},
                  {"dtype", "float32-le"}});
      out.entry.panorama_files.push_back((rel / "panoramas" / (name + ".f32")).generic_string());
    }

    out.entry.id = id;
    out.entry.category = category.name;
    out.entry.kind = std::string(to_string(room.kind()));
    out.entry.geometry_file = (rel / "geometry.json").generic_string();
    out.entry.placement_file = (rel / "placement.json").generic_string();
    out.entry.rir_file = (rel / "rirs.f32").generic_string();
    out.entry.sabine_t60 = sabine_t60(room);
    out.ok = true;
    return out;
  }
  out.warning = "skipped room " + id + " after " + std::to_string(gen.resample_budget + 1) +
                " attempts: " + last_error;
  return out;
}

}  // namespace

DatasetManifest generate_dataset(const GenConfig& gen, const fs::path& out_dir) {
  validate(gen.sim);
  fs::create_directories(out_dir);
  std::vector<std::pair<const RoomCategory*, int>> jobs;
  for (const auto& c : gen.categories) {
    for (int i = 0; i < gen.rooms_per_category; ++i) jobs.emplace_back(&c, i);
  }
  std::vector<GeneratedRoom> results(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    results[i] = generate_room(gen, *jobs[i].first, jobs[i].second, out_dir);
  });

  DatasetManifest m;
  m.format_version = kDatasetFormatVersion;
  m.seed = gen.seed;
  m.gen = gen;
  for (auto& r : results) {
    if (!r.ok) {
      std::cerr << "warning: " << r.warning << "\n";
      m.warnings.push_back(r.warning);
      continue;
    }
    m.rooms.push_back(std::move(r.entry));
    m.rirs.insert(m.rirs.end(), r.index.begin(), r.index.end());
  }
  require(!m.rooms.empty(), ErrorCode::kPlacementInfeasible, "no room could be generated");
  write_json(out_dir / "manifest.json", to_json(m));
  return m;
}

// ---------------------------------------------------------------------------
// Dataset

Dataset Dataset::load(const fs::path& root) {
  Dataset d;
  d.root_ = root;
  d.manifest_ = manifest_from_json(read_json(root / "manifest.json"));
  std::map<std::string, std::size_t> by_id;
  for (const auto& e : d.manifest_.rooms) {
    RoomSpec spec = room_spec_from_json(read_json(root / e.geometry_file));
    Room room = spec.build();
    Placement placement = placement_from_json(read_json(root / e.placement_file));
    require(e.panorama_files.size() == placement.receivers.size(), ErrorCode::kFormat,
            "room " + e.id + ": one panorama per receiver expected");
    by_id[e.id] = d.rooms_.size();
    d.rooms_.push_back(std::unique_ptr<RoomData>(
        new RoomData{std::move(spec), std::move(room), std::move(placement), {}, {}, {}}));
  }
  const std::uint64_t bytes = static_cast<std::uint64_t>(d.manifest_.gen.sim.rir_length) * 4;
  for (const auto& e : d.manifest_.rirs) {
    auto it = by_id.find(e.room_id);
    require(it != by_id.end(), ErrorCode::kFormat, "rir index names unknown room " + e.room_id);
    auto& data = *d.rooms_[it->second];
    require(e.receiver >= 0 && e.receiver < static_cast<int>(data.placement.receivers.size()) &&
                e.source >= 0 && e.source < static_cast<int>(data.placement.sources.size()),
            ErrorCode::kFormat, "rir index entry out of range for room " + e.room_id);
    require(e.offset % bytes == 0, ErrorCode::kFormat, "misaligned rir offset in room " + e.room_id);
    data.offsets[{e.receiver, e.source}] = e.offset;
  }
  return d;
}

std::size_t Dataset::room_index(const std::string& id) const {
  for (std::size_t i = 0; i < manifest_.rooms.size(); ++i) {
    if (manifest_.rooms[i].id == id) return i;
  }
  fail(ErrorCode::kConfig, "unknown room " + id);
}

std::vector<double> Dataset::waveform(std::size_t room, int receiver, int source) const {
  const auto& data = *rooms_.at(room);
  std::call_once(data.loaded, [&] { data.blob = read_f32(root_ / manifest_.rooms[room].rir_file); });
  auto it = data.offsets.find({receiver, source});
  require(it != data.offsets.end(), ErrorCode::kConfig,
          "no rir for receiver " + std::to_string(receiver) + ", source " + std::to_string(source) +
              " in room " + manifest_.rooms[room].id);
  const std::size_t n = static_cast<std::size_t>(sim().rir_length);
  const std::size_t start = it->second / 4;
  require(start + n <= data.blob.size(), ErrorCode::kFormat, "rir blob is truncated");
  return std::vector<double>(data.blob.begin() + start, data.blob.begin() + start + n);
}

RIRRecord Dataset::record(std::size_t room, int receiver, int source) const {
  RIRRecord r;
  r.waveform = waveform(room, receiver, source);
  r.room_id = manifest_.rooms[room].id;
  r.source = placement(room).sources.at(source);
  r.receiver = placement(room).receivers.at(receiver);
  return r;
}

PanoramaDepth Dataset::panorama(std::size_t room, int receiver) const {
  const fs::path file = root_ / manifest_.rooms.at(room).panorama_files.at(receiver);
  fs::path sidecar = file;
  sidecar.replace_extension(".json");
  const json meta = read_json(sidecar);
  PanoramaDepth d;
  d.height = meta.at("height").get<int>();
  d.width = meta.at("width").get<int>();
  d.receiver = vec_from(meta.at("receiver"));
  const auto raw = read_f32(file);
  require(raw.size() == static_cast<std::size_t>(d.height) * d.width, ErrorCode::kFormat,
          file.string() + " does not match its sidecar shape");
  d.values.assign(raw.begin(), raw.end());
  return d;
}

CoordMap Dataset::coords(std::size_t room, int receiver) const {
  return depth_to_coords(panorama(room, receiver));
}

}  // namespace roomecho
