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

#include "roomecho/acoustic_map.hpp"

#include <algorithm>
#include <cmath>

#include "roomecho/baselines.hpp"
#include "roomecho/error.hpp"
#include "roomecho/io.hpp"
#include "roomecho/parallel.hpp"
#include "roomecho/random.hpp"
#include "roomecho/train.hpp"

namespace roomecho {

AcousticMap acoustic_map(const Dataset& data, std::size_t room_idx, int receiver,
                         const AcousticMapConfig& cfg, const XRir<float>* model) {
  require(cfg.resolution > 0.0, ErrorCode::kConfig, "map resolution must be positive");
  require(cfg.method == Method::kNearest || cfg.method == Method::kLinearInterp ||
              cfg.method == Method::kXRir,
          ErrorCode::kConfig, "acoustic maps support nearest, linear-interp and xrir");
  if (cfg.method == Method::kXRir) {
    require(model != nullptr && model->config().k == cfg.k, ErrorCode::kConfig,
            "xrir maps need a checkpoint trained with the requested K");
  }
  const Room& room = data.room(room_idx);
  const Placement& p = data.placement(room_idx);
  const Vec3 rcv = p.receivers.at(receiver);
  const PlacementRules& rules = data.manifest().gen.placement;
  const SimConfig& sim = data.sim();

  AcousticMap map;
  map.room_id = data.entry(room_idx).id;
  map.receiver = receiver;
  const Vec3 lo = room.bbox_min(), hi = room.bbox_max();
  map.nx = std::max(1, static_cast<int>(std::floor((hi.x() - lo.x()) / cfg.resolution)));
  map.ny = std::max(1, static_cast<int>(std::floor((hi.y() - lo.y()) / cfg.resolution)));
  map.cells.resize(static_cast<std::size_t>(map.nx) * map.ny);
  for (int j = 0; j < map.ny; ++j) {
    for (int i = 0; i < map.nx; ++i) {
      MapCell& c = map.cells[static_cast<std::size_t>(j) * map.nx + i];
      c.x = lo.x() + (i + 0.5) * cfg.resolution;
      c.y = lo.y() + (j + 0.5) * cfg.resolution;
      const Vec3 s(c.x, c.y, rcv.z());
      c.valid = room.contains(s) && room.distance_to_surfaces(s) >= rules.source_surface_clearance &&
                (s - rcv).norm() >= rules.source_receiver_distance;
    }
  }
  require(std::any_of(map.cells.begin(), map.cells.end(), [](const MapCell& c) { return c.valid; }),
          ErrorCode::kPlacementInfeasible, "no grid cell satisfies the placement rules");

  Rng rng(SeedHasher(cfg.seed).add(std::string_view("acoustic-map")).add(map.room_id).value());
  const auto refs = choose_references(p, cfg.k, rng);
  std::vector<RIRRecord> recs;
  for (int r : refs) recs.push_back(data.record(room_idx, receiver, r));
  const ReferenceSet set = make_reference_set(std::move(recs));
  std::optional<CoordCache> coords;
  if (model) coords.emplace(data, model->config().map_height, model->config().map_width);

  parallel_for(map.cells.size(), [&](std::size_t idx) {
    MapCell& c = map.cells[idx];
    if (!c.valid) return;
    const Vec3 s(c.x, c.y, rcv.z());
    const auto gt = simulate_rir(room, s, rcv, sim).waveform;
    std::vector<double> pred;
    if (cfg.method == Method::kNearest) {
      pred = predict_nearest(set, s, cfg.align, sim);
    } else if (cfg.method == Method::kLinearInterp) {
      pred = predict_linear_interp(set, s, cfg.align, sim);
    } else {
      Observation obs;
      obs.source = s;
      obs.receiver = rcv;
      obs.scene_scale = room.bbox_diagonal();
      obs.coords = &coords->get(room_idx, receiver);
      for (const auto& r : set.records) {
        obs.ref_sources.push_back(r.source);
        obs.ref_waveforms.emplace_back(r.waveform);
      }
      const auto trace = model->forward(prepare_input(obs, model->config()));
      pred = griffin_lim(to_matrix(trace.s_pred).array().exp().matrix());
    }
    c.c50_pred = safe_metrics(pred, sim.sample_rate).c50;
    c.c50_gt = safe_metrics(gt, sim.sample_rate).c50;
  });
  return map;
}

std::string acoustic_map_csv(const AcousticMap& map) {
  std::string out = "x,y,c50_pred,c50_gt,valid\n";
  for (const auto& c : map.cells) {
    out += format_double(c.x) + "," + format_double(c.y) + "," +
           (c.valid ? format_double(c.c50_pred) : std::string()) + "," +
           (c.valid ? format_double(c.c50_gt) : std::string()) + "," + (c.valid ? "1" : "0") + "\n";
  }
  return out;
}

void write_acoustic_map_pgm(const AcousticMap& map, const fs::path& path, bool ground_truth) {
  std::vector<std::uint8_t> px(map.cells.size(), 0);
  for (int j = 0; j < map.ny; ++j) {
    for (int i = 0; i < map.nx; ++i) {
      const MapCell& c = map.cells[static_cast<std::size_t>(j) * map.nx + i];
      if (!c.valid) continue;
      const double v = ground_truth ? c.c50_gt : c.c50_pred;
      const double t = std::clamp((v + 10.0) / 40.0, 0.0, 1.0);
      // Image rows run top to bottom, so +y is flipped to the top.
      px[static_cast<std::size_t>(map.ny - 1 - j) * map.nx + i] =
          static_cast<std::uint8_t>(std::lround(1.0 + 254.0 * t));
    }
  }
  write_pgm(path, map.nx, map.ny, px);
}

}  // namespace roomecho
