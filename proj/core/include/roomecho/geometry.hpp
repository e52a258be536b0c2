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

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace roomecho {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

// Planar polygon with an inward-facing unit normal (towards the room interior).
struct Surface {
  std::vector<Vec3> vertices;
  Vec3 normal = Vec3::Zero();
  double offset = 0.0;  // normal.dot(x) == offset on the plane
  std::string material_id;
  double absorption = 0.0;

  double area() const;
  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
  Vec3 mirror(const Vec3& p) const { return p - 2.0 * signed_distance(p) * normal; }
  // Inclusive point-in-polygon for a point already on the plane.
  bool contains_projected(const Vec3& p, double eps = 1e-9) const;
  double distance_to(const Vec3& p) const;
};

enum class RoomKind { kShoebox, kPolygonal };

// Vertical-wall extrusion of a simple footprint polygon. Shoeboxes are the
// axis-aligned rectangular special case with the origin at a floor corner.
class Room {
 public:
  Room(std::string id, std::vector<Vec2> footprint, double height,
       std::vector<std::string> material_ids, std::vector<double> absorption);

  const std::string& id() const { return id_; }
  RoomKind kind() const { return kind_; }
  bool is_shoebox() const { return kind_ == RoomKind::kShoebox; }
  const std::vector<Surface>& surfaces() const { return surfaces_; }
  const std::vector<Vec2>& footprint() const { return footprint_; }
  double height() const { return height_; }
  const Vec3& bbox_min() const { return bbox_min_; }
  const Vec3& bbox_max() const { return bbox_max_; }
  Vec3 extents() const { return bbox_max_ - bbox_min_; }
  double bbox_diagonal() const { return extents().norm(); }
  double volume() const;
  double surface_area() const;
  const Vec3& interior_point() const { return interior_point_; }

  // Strictly inside (not on a surface).
  bool contains(const Vec3& p) const;
  double distance_to_surfaces(const Vec3& p) const;
  // Every polygon edge is shared by exactly two surfaces.
  bool is_watertight() const;

  // Replace materials while keeping geometry (used by material resampling).
  Room with_materials(std::vector<std::string> material_ids,
                      std::vector<double> absorption) const;

 private:
  std::string id_;
  RoomKind kind_ = RoomKind::kPolygonal;
  std::vector<Vec2> footprint_;
  double height_ = 0.0;
  std::vector<Surface> surfaces_;
  Vec3 bbox_min_ = Vec3::Zero();
  Vec3 bbox_max_ = Vec3::Zero();
  Vec3 interior_point_ = Vec3::Zero();
};

inline constexpr double kMinRoomExtent = 1.2;

// Surfaces ordered x=0, x=Lx, y=0, y=Ly, floor, ceiling. Materials are
// resolved through the default material library.
Room make_shoebox(const Vec3& dims, const std::array<std::string, 6>& materials,
                  std::string id = "shoebox");
// Explicit broadband absorption per surface (same order as above).
Room make_shoebox(const Vec3& dims, const std::array<double, 6>& absorption,
                  std::string id = "shoebox");
Room make_shoebox(const Vec3& dims, double uniform_absorption,
                  std::string id = "shoebox");

// Walls follow the footprint edges (footprint order after CCW normalization),
// then floor, then ceiling. `materials` has walls + 2 entries.
Room make_polygonal_room(const std::vector<Vec2>& footprint, double height,
                         const std::vector<std::string>& materials,
                         std::string id = "polygonal");
Room make_polygonal_room(const std::vector<Vec2>& footprint, double height,
                         const std::vector<double>& absorption,
                         std::string id = "polygonal");

bool polygon_is_simple(const std::vector<Vec2>& poly);
double polygon_signed_area(const std::vector<Vec2>& poly);
bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p);

// ---------------------------------------------------------------------------
// Placement

struct PlacementRules {
  double source_surface_clearance = 0.5;
  double source_source_distance = 1.0;
  double source_receiver_distance = 1.0;
  double receiver_surface_clearance = 0.5;
  double receiver_source_distance = 0.5;
  double min_height = 0.5;
  double max_height = 2.5;
  int attempts_per_point = 10000;
};

struct Placement {
  std::vector<Vec3> sources;
  std::vector<Vec3> receivers;
  std::vector<int> reference_source_indices;
};

// Checks every placement invariant; returns a description of the first
// violation, or nullopt.
std::optional<std::string> check_placement(const Room& room, const Placement& p,
                                           const PlacementRules& rules = {});

// Rejection sampling under `rules`. `n_reference` candidates are designated
// by farthest-point selection; negative means min(10, n_src / 2) (at least 1).
Placement sample_placements(const Room& room, int n_src, int n_rcv,
                            std::uint64_t seed, int n_reference = -1,
                            const PlacementRules& rules = {});

// Greedy farthest-point subset: starts at the point farthest from the
// centroid, then repeatedly adds the point maximizing the minimum distance
// to the chosen set. Ties go to the lowest index.
std::vector<int> farthest_point_indices(const std::vector<Vec3>& points, int count);

// ---------------------------------------------------------------------------
// Panorama geometry

// H x W grid of 3-vectors, row-major, xyz interleaved.
struct Grid3 {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Grid3() = default;
  Grid3(int h, int w) : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3, 0.0) {}

  Eigen::Map<Vec3> at(int i, int j) {
    return Eigen::Map<Vec3>(data.data() + (static_cast<std::size_t>(i) * width + j) * 3);
  }
  Eigen::Map<const Vec3> at(int i, int j) const {
    return Eigen::Map<const Vec3>(data.data() + (static_cast<std::size_t>(i) * width + j) * 3);
  }
};

inline constexpr int kPanoramaHeight = 256;
inline constexpr int kPanoramaWidth = 512;

struct PanoramaDepth {
  int height = 0;
  int width = 0;
  std::vector<double> values;  // row-major depths in meters
  Vec3 receiver = Vec3::Zero();

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * width + j]; }
};

using CoordMap = Grid3;

struct ReflectionMaps {
  Grid3 source_map;
  Grid3 receiver_map;
  std::vector<Grid3> reference_maps;
};

// World and camera frames share orientation; the camera sits at the receiver.
Vec3 world_to_camera(const Vec3& p, const Vec3& receiver);

// Pixel (i, j): azimuth 2*pi*(j+0.5)/W - pi, elevation pi/2 - pi*(i+0.5)/H.
Grid3 equirect_dirs(int height, int width);
// Inverse of the pixel-centre mapping, continuous pixel coordinates (row, col).
Vec2 direction_to_pixel(const Vec3& dir, int height, int width);

PanoramaDepth render_panorama_depth(const Room& room, const Vec3& receiver,
                                    int height = kPanoramaHeight,
                                    int width = kPanoramaWidth);
CoordMap depth_to_coords(const PanoramaDepth& depth);
ReflectionMaps build_reflection_maps(const CoordMap& coords, const Vec3& receiver,
                                     const Vec3& target_source,
                                     const std::vector<Vec3>& reference_sources);
// Block-average a grid down to (height, width); both must divide the source.
Grid3 downsample(const Grid3& grid, int height, int width);

// Nearest hit distance along `dir` from `origin`, or nullopt.
std::optional<double> cast_ray(const Room& room, const Vec3& origin, const Vec3& dir);

std::string_view to_string(RoomKind kind);

}  // namespace roomecho
