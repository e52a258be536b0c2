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

#include "roomecho/geometry.hpp"

#include <algorithm>
#include <Eigen/Geometry>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <tuple>

#include "roomecho/error.hpp"
#include "roomecho/materials.hpp"
#include "roomecho/random.hpp"

namespace roomecho {

namespace {

constexpr double kPi = std::numbers::pi;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross2(b - a, c - a);
  if (std::abs(v) < 1e-12) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) - 1e-12 <= p.x() && p.x() <= std::max(a.x(), b.x()) + 1e-12 &&
         std::min(a.y(), b.y()) - 1e-12 <= p.y() && p.y() <= std::max(a.y(), b.y()) + 1e-12;
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

// Drop the coordinate along which the normal is largest.
Vec2 project_dominant(const Vec3& p, int drop) {
  switch (drop) {
    case 0: return {p.y(), p.z()};
    case 1: return {p.z(), p.x()};
    default: return {p.x(), p.y()};
  }
}

int dominant_axis(const Vec3& n) {
  const Vec3 a = n.cwiseAbs();
  if (a.x() >= a.y() && a.x() >= a.z()) return 0;
  if (a.y() >= a.z()) return 1;
  return 2;
}

bool is_axis_aligned_rectangle(const std::vector<Vec2>& fp) {
  if (fp.size() != 4) return false;
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2 d = fp[(i + 1) % 4] - fp[i];
    if (std::abs(d.x()) > 1e-12 && std::abs(d.y()) > 1e-12) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Surface

double Surface::area() const {
  Vec3 acc = Vec3::Zero();
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    acc += vertices[i].cross(vertices[(i + 1) % vertices.size()]);
  }
  return 0.5 * std::abs(acc.dot(normal));
}

bool Surface::contains_projected(const Vec3& p, double eps) const {
  const int drop = dominant_axis(normal);
  const Vec2 q = project_dominant(p, drop);
  bool inside = false;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = project_dominant(vertices[i], drop);
    const Vec2 b = project_dominant(vertices[j], drop);
    if (point_segment_distance(q, a, b) <= eps) return true;
    if ((a.y() > q.y()) != (b.y() > q.y())) {
      const double x = (b.x() - a.x()) * (q.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (q.x() < x) inside = !inside;
    }
  }
  return inside;
}

double Surface::distance_to(const Vec3& p) const {
  const double sd = signed_distance(p);
  const Vec3 q = p - sd * normal;
  if (contains_projected(q, 0.0)) return std::abs(sd);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    best = std::min(best, point_segment_distance(p, vertices[i],
                                                 vertices[(i + 1) % vertices.size()]));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Polygon helpers

double polygon_signed_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    a += cross2(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * a;
}

bool polygon_is_simple(const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if ((poly[(i + 1) % n] - poly[i]).norm() < 1e-9) return false;
  }
  if (std::abs(polygon_signed_area(poly)) < 1e-12) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a1 = poly[i];
    const Vec2& a2 = poly[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // Adjacent edges share a vertex by construction.
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(a1, a2, poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

// ---------------------------------------------------------------------------
// Room

Room::Room(std::string id, std::vector<Vec2> footprint, double height,
           std::vector<std::string> material_ids, std::vector<double> absorption)
    : id_(std::move(id)), footprint_(std::move(footprint)), height_(height) {
  require(footprint_.size() >= 3, ErrorCode::kInvalidGeometry, "footprint needs >= 3 vertices");
  require(polygon_is_simple(footprint_), ErrorCode::kInvalidGeometry,
          "footprint is degenerate or self-intersecting");
  require(std::isfinite(height_) && height_ > kMinRoomExtent, ErrorCode::kInvalidGeometry,
          "room height must exceed 1.2 m");
  if (polygon_signed_area(footprint_) < 0.0) {
    std::reverse(footprint_.begin(), footprint_.end());
    // Keep wall materials attached to the same edges: edge i (v_i -> v_i+1)
    // becomes edge n-2-i after reversal, with the closing edge mapping to n-1.
    const std::size_t n = footprint_.size();
    auto remap = [n](auto& v) {
      std::vector<std::decay_t<decltype(v[0])>> walls(v.begin(), v.begin() + n);
      for (std::size_t i = 0; i < n; ++i) v[(2 * n - 2 - i) % n] = walls[i];
    };
    if (material_ids.size() == n + 2) remap(material_ids);
    if (absorption.size() == n + 2) remap(absorption);
  }
  const std::size_t n_walls = footprint_.size();
  require(material_ids.size() == n_walls + 2 && absorption.size() == n_walls + 2,
          ErrorCode::kInvalidGeometry, "need one material per surface (walls + floor + ceiling)");

  Vec2 lo = footprint_[0], hi = footprint_[0];
  for (const auto& v : footprint_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  require((hi - lo).minCoeff() > kMinRoomExtent, ErrorCode::kInvalidGeometry,
          "room footprint extents must exceed 1.2 m");
  bbox_min_ = Vec3(lo.x(), lo.y(), 0.0);
  bbox_max_ = Vec3(hi.x(), hi.y(), height_);

  for (std::size_t i = 0; i < n_walls; ++i) {
    const Vec2& a = footprint_[i];
    const Vec2& b = footprint_[(i + 1) % n_walls];
    const Vec2 d = (b - a).normalized();
    Surface s;
    s.vertices = {Vec3(a.x(), a.y(), 0.0), Vec3(b.x(), b.y(), 0.0), Vec3(b.x(), b.y(), height_),
                  Vec3(a.x(), a.y(), height_)};
    s.normal = Vec3(-d.y(), d.x(), 0.0);
    s.offset = s.normal.dot(s.vertices[0]);
    surfaces_.push_back(std::move(s));
  }
  Surface floor, ceiling;
  for (const auto& v : footprint_) {
    floor.vertices.emplace_back(v.x(), v.y(), 0.0);
    ceiling.vertices.emplace_back(v.x(), v.y(), height_);
  }
  floor.normal = Vec3(0, 0, 1);
  floor.offset = 0.0;
  ceiling.normal = Vec3(0, 0, -1);
  ceiling.offset = -height_;
  surfaces_.push_back(std::move(floor));
  surfaces_.push_back(std::move(ceiling));

  for (std::size_t i = 0; i < surfaces_.size(); ++i) {
    surfaces_[i].material_id = material_ids[i];
    surfaces_[i].absorption = absorption[i];
    require(absorption[i] >= 0.0 && absorption[i] <= 1.0, ErrorCode::kInvalidGeometry,
            "absorption outside [0, 1]");
  }

  if (is_axis_aligned_rectangle(footprint_)) {
    kind_ = RoomKind::kShoebox;
    // Canonical wall order: x-min, x-max, y-min, y-max.
    auto key = [&](const Surface& s) {
      if (s.normal.x() > 0.5) return 0;
      if (s.normal.x() < -0.5) return 1;
      if (s.normal.y() > 0.5) return 2;
      return 3;
    };
    std::stable_sort(surfaces_.begin(), surfaces_.begin() + 4,
                     [&](const Surface& a, const Surface& b) { return key(a) < key(b); });
    interior_point_ = 0.5 * (bbox_min_ + bbox_max_);
  } else {
    kind_ = RoomKind::kPolygonal;
    double best = -1.0;
    constexpr int kGrid = 41;
    const Vec3 ext = extents();
    for (int a = 1; a < kGrid; ++a) {
      for (int b = 1; b < kGrid; ++b) {
        const Vec3 p(bbox_min_.x() + ext.x() * a / kGrid, bbox_min_.y() + ext.y() * b / kGrid,
                     0.5 * height_);
        if (!contains(p)) continue;
        const double d = distance_to_surfaces(p);
        if (d > best) {
          best = d;
          interior_point_ = p;
        }
      }
    }
    require(best > 0.0, ErrorCode::kInvalidGeometry, "room has no interior");
  }
}

Room Room::with_materials(std::vector<std::string> material_ids,
                          std::vector<double> absorption) const {
  Room r = *this;
  require(material_ids.size() == surfaces_.size() && absorption.size() == surfaces_.size(),
          ErrorCode::kInvalidGeometry, "material count mismatch");
  for (std::size_t i = 0; i < r.surfaces_.size(); ++i) {
    r.surfaces_[i].material_id = std::move(material_ids[i]);
    r.surfaces_[i].absorption = absorption[i];
  }
  return r;
}

double Room::volume() const { return std::abs(polygon_signed_area(footprint_)) * height_; }

double Room::surface_area() const {
  double s = 0.0;
  for (const auto& surf : surfaces_) s += surf.area();
  return s;
}

bool Room::contains(const Vec3& p) const {
  if (!(p.z() > 0.0 && p.z() < height_)) return false;
  const Vec2 q(p.x(), p.y());
  if (!point_in_polygon(footprint_, q)) return false;
  for (std::size_t i = 0; i < footprint_.size(); ++i) {
    if (point_segment_distance(q, footprint_[i], footprint_[(i + 1) % footprint_.size()]) <
        1e-9) {
      return false;
    }
  }
  return true;
}

double Room::distance_to_surfaces(const Vec3& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : surfaces_) best = std::min(best, s.distance_to(p));
  return best;
}

bool Room::is_watertight() const {
  using Key = std::tuple<long long, long long, long long>;
  auto quant = [](const Vec3& v) {
    return Key{std::llround(v.x() * 1e7), std::llround(v.y() * 1e7), std::llround(v.z() * 1e7)};
  };
  std::map<std::pair<Key, Key>, int> edges;
  for (const auto& s : surfaces_) {
    if (s.vertices.size() < 3) return false;
    for (std::size_t i = 0; i < s.vertices.size(); ++i) {
      Key a = quant(s.vertices[i]);
      Key b = quant(s.vertices[(i + 1) % s.vertices.size()]);
      if (b < a) std::swap(a, b);
      ++edges[{a, b}];
    }
  }
  return std::all_of(edges.begin(), edges.end(), [](const auto& e) { return e.second == 2; });
}

std::string_view to_string(RoomKind kind) {
  return kind == RoomKind::kShoebox ? "shoebox" : "polygonal";
}

// ---------------------------------------------------------------------------
// Factories

namespace {

std::vector<Vec2> box_footprint(const Vec3& dims) {
  return {Vec2(0, 0), Vec2(dims.x(), 0), Vec2(dims.x(), dims.y()), Vec2(0, dims.y())};
}

template <class T>
std::vector<T> shoebox_to_footprint_order(const std::array<T, 6>& m) {
  // Footprint edges: y-min, x-max, y-max, x-min.
  return {m[2], m[1], m[3], m[0], m[4], m[5]};
}

void check_dims(const Vec3& dims) {
  for (int i = 0; i < 3; ++i) {
    require(std::isfinite(dims[i]) && dims[i] > kMinRoomExtent, ErrorCode::kInvalidGeometry,
            "shoebox extents must all exceed 1.2 m");
  }
}

}  // namespace

Room make_shoebox(const Vec3& dims, const std::array<std::string, 6>& materials, std::string id) {
  check_dims(dims);
  const auto& lib = default_material_library();
  std::array<double, 6> alpha{};
  for (int i = 0; i < 6; ++i) alpha[i] = lib.get(materials[i]).absorption;
  return Room(std::move(id), box_footprint(dims), dims.z(), shoebox_to_footprint_order(materials),
              shoebox_to_footprint_order(alpha));
}

Room make_shoebox(const Vec3& dims, const std::array<double, 6>& absorption, std::string id) {
  check_dims(dims);
  std::array<std::string, 6> ids;
  ids.fill("custom");
  return Room(std::move(id), box_footprint(dims), dims.z(), shoebox_to_footprint_order(ids),
              shoebox_to_footprint_order(absorption));
}

Room make_shoebox(const Vec3& dims, double uniform_absorption, std::string id) {
  std::array<double, 6> a{};
  a.fill(uniform_absorption);
  return make_shoebox(dims, a, std::move(id));
}

Room make_polygonal_room(const std::vector<Vec2>& footprint, double height,
                         const std::vector<std::string>& materials, std::string id) {
  const auto& lib = default_material_library();
  std::vector<double> alpha;
  for (const auto& m : materials) alpha.push_back(lib.get(m).absorption);
  return Room(std::move(id), footprint, height, materials, alpha);
}

Room make_polygonal_room(const std::vector<Vec2>& footprint, double height,
                         const std::vector<double>& absorption, std::string id) {
  std::vector<std::string> ids(absorption.size(), "custom");
  return Room(std::move(id), footprint, height, ids, absorption);
}

// ---------------------------------------------------------------------------
// Placement

std::optional<std::string> check_placement(const Room& room, const Placement& p,
                                           const PlacementRules& rules) {
  constexpr double kTol = 1e-9;
  auto height_ok = [&](const Vec3& v) {
    return v.z() >= rules.min_height - kTol && v.z() <= rules.max_height + kTol;
  };
  for (std::size_t i = 0; i < p.sources.size(); ++i) {
    const Vec3& s = p.sources[i];
    if (!room.contains(s)) return "source " + std::to_string(i) + " outside room";
    if (room.distance_to_surfaces(s) < rules.source_surface_clearance - kTol)
      return "source " + std::to_string(i) + " too close to a surface";
    if (!height_ok(s)) return "source " + std::to_string(i) + " height out of range";
    for (std::size_t j = 0; j < i; ++j) {
      if ((s - p.sources[j]).norm() < rules.source_source_distance - kTol)
        return "sources " + std::to_string(j) + "/" + std::to_string(i) + " too close";
    }
  }
  const double rs = std::max(rules.source_receiver_distance, rules.receiver_source_distance);
  for (std::size_t i = 0; i < p.receivers.size(); ++i) {
    const Vec3& r = p.receivers[i];
    if (!room.contains(r)) return "receiver " + std::to_string(i) + " outside room";
    if (room.distance_to_surfaces(r) < rules.receiver_surface_clearance - kTol)
      return "receiver " + std::to_string(i) + " too close to a surface";
    if (!height_ok(r)) return "receiver " + std::to_string(i) + " height out of range";
    for (std::size_t j = 0; j < p.sources.size(); ++j) {
      if ((r - p.sources[j]).norm() < rs - kTol)
        return "receiver " + std::to_string(i) + " too close to source " + std::to_string(j);
    }
  }
  for (int idx : p.reference_source_indices) {
    if (idx < 0 || idx >= static_cast<int>(p.sources.size()))
      return "reference index out of range";
  }
  return std::nullopt;
}

namespace {

Vec3 sample_point(const Room& room, double clearance, const PlacementRules& rules,
                  const std::vector<std::pair<const std::vector<Vec3>*, double>>& keep_away,
                  Rng& rng, const char* what) {
  const Vec3 lo = room.bbox_min();
  const Vec3 hi = room.bbox_max();
  const double zlo = std::max(rules.min_height, clearance);
  const double zhi = std::min(rules.max_height, room.height() - clearance);
  for (int attempt = 0; attempt < rules.attempts_per_point; ++attempt) {
    const Vec3 p(rng.uniform(lo.x() + clearance, hi.x() - clearance),
                 rng.uniform(lo.y() + clearance, hi.y() - clearance), rng.uniform(zlo, zhi));
    if (zhi < zlo) break;
    if (!room.contains(p) || room.distance_to_surfaces(p) < clearance) continue;
    bool ok = true;
    for (const auto& [others, min_dist] : keep_away) {
      for (const auto& o : *others) {
        if ((p - o).norm() < min_dist) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) return p;
  }
  fail(ErrorCode::kPlacementInfeasible,
       std::string("could not place ") + what + " in room " + room.id() + " within budget");
}

}  // namespace

Placement sample_placements(const Room& room, int n_src, int n_rcv, std::uint64_t seed,
                            int n_reference, const PlacementRules& rules) {
  require(n_src >= 1 && n_rcv >= 1, ErrorCode::kConfig, "need at least one source and receiver");
  Rng rng(SeedHasher(seed).add(std::string_view("placement")).add(room.id()).value());
  Placement p;
  for (int i = 0; i < n_src; ++i) {
    p.sources.push_back(sample_point(room, rules.source_surface_clearance, rules,
                                     {{&p.sources, rules.source_source_distance}}, rng, "source"));
  }
  const double rs = std::max(rules.source_receiver_distance, rules.receiver_source_distance);
  for (int i = 0; i < n_rcv; ++i) {
    p.receivers.push_back(
        sample_point(room, rules.receiver_surface_clearance, rules, {{&p.sources, rs}}, rng,
                     "receiver"));
  }
  if (n_reference < 0) n_reference = std::max(1, std::min(10, n_src / 2));
  p.reference_source_indices = farthest_point_indices(p.sources, std::min(n_reference, n_src));
  return p;
}

std::vector<int> farthest_point_indices(const std::vector<Vec3>& points, int count) {
  std::vector<int> chosen;
  const int n = static_cast<int>(points.size());
  if (count <= 0 || n == 0) return chosen;
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= n;
  int first = 0;
  for (int i = 1; i < n; ++i) {
    if ((points[i] - centroid).norm() > (points[first] - centroid).norm()) first = i;
  }
  chosen.push_back(first);
  std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
  while (static_cast<int>(chosen.size()) < std::min(count, n)) {
    const Vec3& last = points[chosen.back()];
    int best = -1;
    for (int i = 0; i < n; ++i) {
      min_d[i] = std::min(min_d[i], (points[i] - last).norm());
      if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
      if (best < 0 || min_d[i] > min_d[best]) best = i;
    }
    chosen.push_back(best);
  }
  return chosen;
}

// ---------------------------------------------------------------------------
// Panorama

Vec3 world_to_camera(const Vec3& p, const Vec3& receiver) { return p - receiver; }

Grid3 equirect_dirs(int height, int width) {
  require(height >= 2 && width >= 2, ErrorCode::kShape, "panorama must be at least 2x2");
  Grid3 g(height, width);
  for (int i = 0; i < height; ++i) {
    const double elev = kPi / 2.0 - kPi * (i + 0.5) / height;
    for (int j = 0; j < width; ++j) {
      const double az = 2.0 * kPi * (j + 0.5) / width - kPi;
      g.at(i, j) = Vec3(std::cos(elev) * std::cos(az), std::cos(elev) * std::sin(az),
                        std::sin(elev));
    }
  }
  return g;
}

Vec2 direction_to_pixel(const Vec3& dir, int height, int width) {
  const Vec3 d = dir.normalized();
  const double az = std::atan2(d.y(), d.x());
  const double elev = std::asin(std::clamp(d.z(), -1.0, 1.0));
  return Vec2((kPi / 2.0 - elev) * height / kPi - 0.5, (az + kPi) * width / (2.0 * kPi) - 0.5);
}

std::optional<double> cast_ray(const Room& room, const Vec3& origin, const Vec3& dir) {
  std::optional<double> best;
  for (const auto& s : room.surfaces()) {
    const double denom = s.normal.dot(dir);
    if (std::abs(denom) < 1e-15) continue;
    const double t = (s.offset - s.normal.dot(origin)) / denom;
    if (t <= 1e-12) continue;
    if (best && t >= *best) continue;
    if (s.contains_projected(origin + t * dir, 1e-9)) best = t;
  }
  return best;
}

PanoramaDepth render_panorama_depth(const Room& room, const Vec3& receiver, int height,
                                    int width) {
  if (!receiver.allFinite() || !room.contains(receiver) ||
      room.distance_to_surfaces(receiver) <= 1e-9) {
    fail(ErrorCode::kInvalidViewpoint, "receiver is not strictly inside room " + room.id());
  }
  const Grid3 dirs = equirect_dirs(height, width);
  PanoramaDepth out;
  out.height = height;
  out.width = width;
  out.receiver = receiver;
  out.values.resize(static_cast<std::size_t>(height) * width);
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      const auto hit = cast_ray(room, receiver, dirs.at(i, j));
      require(hit.has_value(), ErrorCode::kInvalidGeometry,
              "panorama ray escaped room " + room.id());
      out.values[static_cast<std::size_t>(i) * width + j] = *hit;
    }
  }
  return out;
}

CoordMap depth_to_coords(const PanoramaDepth& depth) {
  const Grid3 dirs = equirect_dirs(depth.height, depth.width);
  CoordMap out(depth.height, depth.width);
  for (int i = 0; i < depth.height; ++i) {
    for (int j = 0; j < depth.width; ++j) out.at(i, j) = depth.at(i, j) * dirs.at(i, j);
  }
  return out;
}

ReflectionMaps build_reflection_maps(const CoordMap& coords, const Vec3& receiver,
                                     const Vec3& target_source,
                                     const std::vector<Vec3>& reference_sources) {
  auto offset_map = [&](const Vec3& world) {
    const Vec3 rel = world_to_camera(world, receiver);
    Grid3 m(coords.height, coords.width);
    for (std::size_t i = 0; i < coords.data.size(); i += 3) {
      for (int c = 0; c < 3; ++c) m.data[i + c] = rel[c] - coords.data[i + c];
    }
    return m;
  };
  ReflectionMaps maps;
  maps.source_map = offset_map(target_source);
  maps.receiver_map = coords;
  for (const auto& r : reference_sources) maps.reference_maps.push_back(offset_map(r));
  return maps;
}

Grid3 downsample(const Grid3& grid, int height, int width) {
  require(height > 0 && width > 0 && grid.height % height == 0 && grid.width % width == 0,
          ErrorCode::kShape, "downsample target must divide the grid");
  const int fh = grid.height / height;
  const int fw = grid.width / width;
  if (fh == 1 && fw == 1) return grid;
  Grid3 out(height, width);
  const double inv = 1.0 / (fh * fw);
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      Vec3 acc = Vec3::Zero();
      for (int a = 0; a < fh; ++a) {
        for (int b = 0; b < fw; ++b) acc += grid.at(i * fh + a, j * fw + b);
      }
      out.at(i, j) = acc * inv;
    }
  }
  return out;
}

}  // namespace roomecho
