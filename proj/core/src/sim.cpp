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

#include "roomecho/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include "roomecho/error.hpp"
#include "roomecho/random.hpp"

namespace roomecho {

namespace {

constexpr double kPlaneTol = 1e-9;

// Mirror chains that land on the same point agree to ~1e-12 m, far below
// the 1e-7 m cell size.
std::array<long long, 3> quantize(const Vec3& p) {
  return {std::llround(p.x() * 1e7), std::llround(p.y() * 1e7), std::llround(p.z() * 1e7)};
}

double reflection_factor(double alpha) { return std::sqrt(std::max(0.0, 1.0 - alpha)); }

std::vector<ImageSource> lattice_images(const Room& room, const Vec3& source, int order) {
  const Vec3 lo = room.bbox_min();
  const Vec3 ext = room.extents();
  const Vec3 s = source - lo;
  std::array<double, 6> beta{};
  for (int i = 0; i < 6; ++i) beta[i] = reflection_factor(room.surfaces()[i].absorption);

  // Per axis: position (1 - 2q) * s + 2 a L, with |a - q| hits on the low
  // wall and |a| hits on the high wall.
  struct AxisImage {
    double pos;
    int low_hits;
    int high_hits;
  };
  std::array<std::vector<AxisImage>, 3> axes;
  for (int ax = 0; ax < 3; ++ax) {
    for (int a = -order; a <= order; ++a) {
      for (int q = 0; q <= 1; ++q) {
        const int lh = std::abs(a - q);
        const int hh = std::abs(a);
        if (lh + hh > order) continue;
        axes[ax].push_back({(1 - 2 * q) * s[ax] + 2.0 * a * ext[ax], lh, hh});
      }
    }
  }
  std::vector<ImageSource> out;
  for (const auto& x : axes[0]) {
    for (const auto& y : axes[1]) {
      const int oxy = x.low_hits + x.high_hits + y.low_hits + y.high_hits;
      if (oxy > order) continue;
      for (const auto& z : axes[2]) {
        const int o = oxy + z.low_hits + z.high_hits;
        if (o > order) continue;
        ImageSource img;
        img.position = lo + Vec3(x.pos, y.pos, z.pos);
        img.order = o;
        img.attenuation = std::pow(beta[0], x.low_hits) * std::pow(beta[1], x.high_hits) *
                          std::pow(beta[2], y.low_hits) * std::pow(beta[3], y.high_hits) *
                          std::pow(beta[4], z.low_hits) * std::pow(beta[5], z.high_hits);
        if (img.attenuation <= 0.0) continue;
        out.push_back(std::move(img));
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ImageSource& a, const ImageSource& b) { return a.order < b.order; });
  return out;
}

std::vector<ImageSource> recursive_images(const Room& room, const Vec3& source, int order) {
  const auto& surfaces = room.surfaces();
  std::vector<ImageSource> out;
  ImageSource root;
  root.position = source;
  out.push_back(root);
  std::vector<ImageSource> frontier{root};
  std::map<std::array<long long, 3>, std::size_t> index;
  index.emplace(quantize(source), 0);
  for (int o = 1; o <= order; ++o) {
    std::vector<ImageSource> next;
    for (const auto& parent : frontier) {
      for (int w = 0; w < static_cast<int>(surfaces.size()); ++w) {
        if (!parent.walls.empty() && parent.walls.back() == w) continue;
        const Surface& s = surfaces[w];
        // The mirrored point must lie in front of the wall it mirrors across.
        if (s.signed_distance(parent.position) <= kPlaneTol) continue;
        ImageSource child;
        child.position = s.mirror(parent.position);
        child.order = o;
        child.attenuation = parent.attenuation * reflection_factor(s.absorption);
        child.walls = parent.walls;
        child.walls.push_back(w);
        next.push_back(child);
      }
    }
    for (auto& img : next) {
      // Zero-attenuation images are kept while recursing and dropped at the end.
      const auto key = quantize(img.position);
      auto [it, inserted] = index.emplace(key, out.size());
      if (inserted) {
        out.push_back(img);
      } else {
        out[it->second].alternatives.push_back(img.walls);
      }
    }
    frontier = std::move(next);
  }
  std::erase_if(out, [](const ImageSource& i) { return i.attenuation <= 0.0; });
  return out;
}

bool segment_blocked(const Room& room, const Vec3& a, const Vec3& b, int skip_a, int skip_b) {
  const Vec3 d = b - a;
  const auto& surfaces = room.surfaces();
  for (int w = 0; w < static_cast<int>(surfaces.size()); ++w) {
    const Surface& s = surfaces[w];
    const double denom = s.normal.dot(d);
    if (std::abs(denom) < 1e-15) continue;
    const double t = (s.offset - s.normal.dot(a)) / denom;
    // A segment starting or ending on a wall plane cannot cross that plane.
    if (w == skip_a || w == skip_b) continue;
    if (t <= 1e-9 || t >= 1.0 - 1e-9) continue;
    if (s.contains_projected(a + t * d, 1e-12)) return true;
  }
  return false;
}

bool sequence_valid(const Room& room, const std::vector<int>& walls, const Vec3& source,
                    const Vec3& receiver) {
  const auto& surfaces = room.surfaces();
  // Rebuild the image chain.
  std::vector<Vec3> chain{source};
  for (int w : walls) chain.push_back(surfaces[w].mirror(chain.back()));
  Vec3 current = receiver;
  int current_wall = -1;
  for (int k = static_cast<int>(walls.size()); k >= 1; --k) {
    const Surface& s = surfaces[walls[k - 1]];
    const Vec3 d = chain[k] - current;
    const double denom = s.normal.dot(d);
    if (std::abs(denom) < 1e-15) return false;
    const double t = (s.offset - s.normal.dot(current)) / denom;
    if (t <= 1e-12 || t >= 1.0) return false;
    const Vec3 hit = current + t * d;
    if (!s.contains_projected(hit, 1e-12)) return false;
    if (segment_blocked(room, current, hit, current_wall, walls[k - 1])) return false;
    current = hit;
    current_wall = walls[k - 1];
  }
  return !segment_blocked(room, current, source, current_wall, -1);
}

}  // namespace

void validate(const SimConfig& cfg) {
  require(cfg.sample_rate > 0.0 && std::isfinite(cfg.sample_rate), ErrorCode::kConfig,
          "sample_rate must be positive");
  require(cfg.rir_length > 0, ErrorCode::kConfig, "rir_length must be positive");
  require(cfg.speed_of_sound > 0.0, ErrorCode::kConfig, "speed_of_sound must be positive");
  require(cfg.max_reflection_order >= 0, ErrorCode::kConfig, "max_reflection_order must be >= 0");
  require(cfg.tail_rays >= 0, ErrorCode::kConfig, "tail_rays must be >= 0");
}

std::vector<ImageSource> enumerate_image_sources(const Room& room, const Vec3& source, int order) {
  require(order >= 0, ErrorCode::kConfig, "reflection order must be >= 0");
  require(room.is_watertight(), ErrorCode::kInvalidGeometry, "room " + room.id() + " is not watertight");
  require(room.contains(source), ErrorCode::kInvalidPlacement, "source outside room");
  if (room.is_shoebox()) return lattice_images(room, source, order);
  return recursive_images(room, source, order);
}

bool image_path_valid(const Room& room, const ImageSource& image, const Vec3& source,
                      const Vec3& receiver) {
  if (room.is_shoebox() && image.walls.empty()) return true;
  if (image.walls.empty()) return !segment_blocked(room, receiver, source, -1, -1);
  if (sequence_valid(room, image.walls, source, receiver)) return true;
  for (const auto& alt : image.alternatives) {
    if (sequence_valid(room, alt, source, receiver)) return true;
  }
  return false;
}

std::vector<Arrival> image_source_arrivals(const Room& room, const Vec3& source,
                                           const Vec3& receiver, const SimConfig& cfg) {
  std::vector<Arrival> out;
  for (const auto& img : enumerate_image_sources(room, source, cfg.max_reflection_order)) {
    if (!image_path_valid(room, img, source, receiver)) continue;
    const double d = (img.position - receiver).norm();
    out.push_back({d / cfg.speed_of_sound * cfg.sample_rate,
                   img.attenuation / (4.0 * std::numbers::pi * d), img.order});
  }
  std::stable_sort(out.begin(), out.end(), [](const Arrival& a, const Arrival& b) {
    return a.delay_samples < b.delay_samples;
  });
  return out;
}

double sabine_t60(const Room& room) {
  double absorption_area = 0.0;
  for (const auto& s : room.surfaces()) absorption_area += s.absorption * s.area();
  require(absorption_area > 0.0, ErrorCode::kInfiniteReverberation,
          "room " + room.id() + " has no absorption");
  return 0.161 * room.volume() / absorption_area;
}

RIRRecord simulate_rir(const Room& room, const Vec3& source, const Vec3& receiver,
                       const SimConfig& cfg) {
  validate(cfg);
  require(room.contains(source) && room.contains(receiver), ErrorCode::kInvalidPlacement,
          "source and receiver must be inside room " + room.id());
  require((source - receiver).norm() >= cfg.min_source_receiver_distance,
          ErrorCode::kInvalidPlacement, "source and receiver closer than the minimum distance");
  require(room.distance_to_surfaces(source) >= cfg.min_surface_clearance &&
              room.distance_to_surfaces(receiver) >= cfg.min_surface_clearance,
          ErrorCode::kInvalidPlacement, "source or receiver too close to a surface");

  RIRRecord rec;
  rec.room_id = room.id();
  rec.source = source;
  rec.receiver = receiver;
  const int n = cfg.rir_length;
  rec.waveform.assign(n, 0.0);
  auto& h = rec.waveform;

  auto deposit = [&](double delay, double amp) {
    if (delay < 0.0 || delay >= n) return;
    const int i = static_cast<int>(std::floor(delay));
    const double frac = delay - i;
    h[i] += amp * (1.0 - frac);
    if (i + 1 < n) h[i + 1] += amp * frac;
  };

  double last_delay = 0.0;
  for (const auto& a : image_source_arrivals(room, source, receiver, cfg)) {
    deposit(a.delay_samples, a.amplitude);
    last_delay = std::max(last_delay, a.delay_samples);
  }

  double mean_alpha = 0.0;
  for (const auto& s : room.surfaces()) mean_alpha += s.absorption * s.area();
  mean_alpha /= room.surface_area();
  if (cfg.tail_enabled && mean_alpha < 1.0) {
    const double t60 = sabine_t60(room);
    const int onset = static_cast<int>(std::ceil(last_delay)) + 1;
    if (onset < n) {
      Rng rng(SeedHasher(cfg.seed)
                  .add(std::string_view("tail"))
                  .add(room.id())
                  .add(std::span<const double>(source.data(), 3))
                  .add(std::span<const double>(receiver.data(), 3))
                  .value());
      const double fs = cfg.sample_rate;
      // Diffuse-field energy arriving per second at time t for a 1/(4 pi d)
      // point-source normalization, c (1 - mean alpha) / (4 pi V) * 10^(-6 t / T60).
      // Only reflected energy feeds the diffuse field.
      const double rate0 =
          cfg.speed_of_sound * (1.0 - mean_alpha) / (4.0 * std::numbers::pi * room.volume());
      auto decay = [&](double t) { return std::pow(10.0, -6.0 * t / t60); };
      if (cfg.tail_rays == 0) {
        for (int i = onset; i < n; ++i) {
          const double t = i / fs;
          h[i] += rng.normal() * std::sqrt(rate0 / fs * decay(t));
        }
      } else {
        // Arrival times with echo density proportional to t^2.
        const double t0 = onset / fs;
        const double t1 = n / fs;
        const double span3 = t1 * t1 * t1 - t0 * t0 * t0;
        for (int r = 0; r < cfg.tail_rays; ++r) {
          const double t = std::cbrt(t0 * t0 * t0 + rng.uniform() * span3);
          const double density = cfg.tail_rays * 3.0 * t * t / span3;
          const double energy = rate0 * decay(t) / density;
          const double sign = (rng.next_u64() & 1U) ? 1.0 : -1.0;
          deposit(t * fs, sign * std::sqrt(energy));
        }
      }
    }
  }
  return rec;
}

}  // namespace roomecho
