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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "roomecho/error.hpp"
#include "roomecho/geometry.hpp"
#include "roomecho/random.hpp"

namespace roomecho {
namespace {

std::vector<Vec2> l_footprint() {
  return {{0, 0}, {6, 0}, {6, 3}, {3, 3}, {3, 5}, {0, 5}};
}

// Exhaustive intersection of a ray with every wall polygon, written directly
// against the footprint so it shares no code with Room::surfaces().
double oracle_ray_depth(const std::vector<Vec2>& fp, double h, const Vec3& o, const Vec3& d) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = fp.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = fp[i], b = fp[(i + 1) % n];
    // Solve o.xy + t d.xy = a + s (b - a).
    const Vec2 e = b - a;
    const double den = d.x() * (-e.y()) - d.y() * (-e.x());
    if (std::abs(den) < 1e-14) continue;
    const Vec2 r(a.x() - o.x(), a.y() - o.y());
    const double t = (r.x() * (-e.y()) - r.y() * (-e.x())) / den;
    const double s = (d.x() * r.y() - d.y() * r.x()) / den;
    if (t <= 1e-12 || s < 0 || s > 1) continue;
    const double z = o.z() + t * d.z();
    if (z < 0 || z > h) continue;
    best = std::min(best, t);
  }
  for (double plane : {0.0, h}) {
    if (std::abs(d.z()) < 1e-14) continue;
    const double t = (plane - o.z()) / d.z();
    if (t <= 1e-12) continue;
    const Vec2 p(o.x() + t * d.x(), o.y() + t * d.y());
    if (point_in_polygon(fp, p)) best = std::min(best, t);
  }
  return best;
}

TEST(Shoebox, VolumeAndSurfaces) {
  const Room r = make_shoebox(Vec3(4, 5, 3), 0.2);
  EXPECT_EQ(r.surfaces().size(), 6u);
  EXPECT_NEAR(r.volume(), 60.0, 1e-12);
  EXPECT_NEAR(r.surface_area(), 94.0, 1e-12);
  EXPECT_TRUE(r.is_shoebox());
  EXPECT_TRUE(r.is_watertight());
}

TEST(Shoebox, TooSmallExtentRejected) {
  try {
    make_shoebox(Vec3(1, 1, 1), 0.2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidGeometry);
  }
}

TEST(Shoebox, Containment) {
  const Room r = make_shoebox(Vec3(4, 5, 3), 0.2);
  EXPECT_TRUE(r.contains(Vec3(2, 2.5, 1.5)));
  EXPECT_FALSE(r.contains(Vec3(5, 0, 0)));
}

TEST(Polygonal, LShapeHasEightSurfaces) {
  const Room r = make_polygonal_room(l_footprint(), 3.0, std::vector<double>(8, 0.3));
  EXPECT_EQ(r.surfaces().size(), 8u);
  EXPECT_FALSE(r.is_shoebox());
  EXPECT_TRUE(r.is_watertight());
  EXPECT_NEAR(r.volume(), (6 * 3 + 3 * 2) * 3.0, 1e-9);
}

TEST(Polygonal, SquareMatchesShoebox) {
  const Room sq = make_polygonal_room({{0, 0}, {4, 0}, {4, 4}, {0, 4}}, 3.0, std::vector<double>(6, 0.3));
  const Room sb = make_shoebox(Vec3(4, 4, 3), 0.3);
  ASSERT_EQ(sq.surfaces().size(), sb.surfaces().size());
  EXPECT_NEAR(sq.volume(), sb.volume(), 1e-12);
  // Same set of (normal, offset) planes.
  for (const auto& s : sb.surfaces()) {
    bool found = false;
    for (const auto& q : sq.surfaces()) {
      if ((q.normal - s.normal).norm() < 1e-12 && std::abs(q.offset - s.offset) < 1e-12) {
        EXPECT_NEAR(q.area(), s.area(), 1e-12);
        found = true;
      }
    }
    EXPECT_TRUE(found);
  }
}

TEST(Polygonal, BowTieRejected) {
  EXPECT_THROW(make_polygonal_room({{0, 0}, {4, 4}, {4, 0}, {0, 4}}, 3.0, std::vector<double>(6, 0.3)), Error);
  EXPECT_FALSE(polygon_is_simple({{0, 0}, {4, 4}, {4, 0}, {0, 4}}));
}

TEST(Placement, SourceClearance) {
  const Room r = make_shoebox(Vec3(4, 5, 3), 0.2);
  const Placement p = sample_placements(r, 4, 4, 7);
  ASSERT_EQ(p.sources.size(), 4u);
  for (const auto& s : p.sources) EXPECT_GE(r.distance_to_surfaces(s), 0.5 - 1e-12);
  EXPECT_FALSE(check_placement(r, p).has_value());
}

TEST(Placement, InfeasiblePacking) {
  const Room r = make_shoebox(Vec3(1.5, 1.5, 1.5), 0.2);
  PlacementRules rules;
  rules.attempts_per_point = 2000;
  try {
    sample_placements(r, 10, 10, 1, -1, rules);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPlacementInfeasible);
  }
}

TEST(Placement, Deterministic) {
  const Room r = make_polygonal_room(l_footprint(), 3.0, std::vector<double>(8, 0.3));
  const Placement a = sample_placements(r, 6, 4, 99);
  const Placement b = sample_placements(r, 6, 4, 99);
  ASSERT_EQ(a.sources.size(), b.sources.size());
  for (std::size_t i = 0; i < a.sources.size(); ++i) EXPECT_EQ(a.sources[i], b.sources[i]);
  for (std::size_t i = 0; i < a.receivers.size(); ++i) EXPECT_EQ(a.receivers[i], b.receivers[i]);
  EXPECT_EQ(a.reference_source_indices, b.reference_source_indices);
}

TEST(Placement, InvariantsAcrossSeededTrials) {
  Rng rng(5);
  for (int room = 0; room < 10; ++room) {
    const Vec3 dims(rng.uniform(3.5, 8), rng.uniform(3.5, 8), rng.uniform(2.6, 4));
    const Room r = make_shoebox(dims, 0.3);
    for (int trial = 0; trial < 100; ++trial) {
      const Placement p = sample_placements(r, 3, 2, static_cast<std::uint64_t>(room * 1000 + trial));
      ASSERT_FALSE(check_placement(r, p).has_value());
    }
  }
}

TEST(Camera, IdentityIsometry) {
  const Vec3 rcv(1, 2, 3);
  EXPECT_EQ(world_to_camera(rcv, rcv), Vec3::Zero());
  EXPECT_TRUE(world_to_camera(rcv + Vec3(1, 0, 0), rcv).isApprox(Vec3(1, 0, 0)));
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const Vec3 a(rng.normal(), rng.normal(), rng.normal());
    const Vec3 b(rng.normal(), rng.normal(), rng.normal());
    EXPECT_DOUBLE_EQ((world_to_camera(a, rcv) - world_to_camera(b, rcv)).norm(), (a - b).norm());
  }
}

TEST(Equirect, Convention) {
  const int h = 256, w = 512;
  const Grid3 d = equirect_dirs(h, w);
  const double pixel = std::numbers::pi / h;
  const Vec3 c = d.at(h / 2, w / 2);
  EXPECT_LT(std::acos(std::clamp(c.dot(Vec3(1, 0, 0)), -1.0, 1.0)), 1.5 * pixel);
  for (int i = 0; i < h; i += 7) {
    for (int j = 0; j < w; j += 5) EXPECT_NEAR(d.at(i, j).norm(), 1.0, 1e-12);
  }
  for (int j = 0; j < w; ++j) EXPECT_GT(std::asin(d.at(0, j).z()), std::numbers::pi / 2 - pixel);
  // Pixel center formula.
  const double phi = 2 * std::numbers::pi * (10 + 0.5) / w - std::numbers::pi;
  const double theta = std::numbers::pi / 2 - std::numbers::pi * (20 + 0.5) / h;
  EXPECT_TRUE(d.at(20, 10).isApprox(Vec3(std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi),
                                         std::sin(theta)), 1e-12));
}

TEST(Equirect, ReprojectionRecoversPixelCenters) {
  const int h = 32, w = 64;
  const Grid3 d = equirect_dirs(h, w);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const Vec2 px = direction_to_pixel(Vec3(3.0 * d.at(i, j)), h, w);
      EXPECT_NEAR(px.x(), i, 0.5);
      EXPECT_NEAR(px.y(), j, 0.5);
    }
  }
}

TEST(Panorama, ShoeboxCenterDepth) {
  const Room r = make_shoebox(Vec3(4, 5, 3), 0.2);
  const Vec3 rcv(2, 2.5, 1.5);
  EXPECT_NEAR(*cast_ray(r, rcv, Vec3(1, 0, 0)), 2.0, 1e-12);
  const PanoramaDepth p = render_panorama_depth(r, rcv);
  EXPECT_EQ(p.height, 256);
  EXPECT_EQ(p.width, 512);
  // Pixel nearest to +x: analytic plane distance along its direction.
  const Grid3 dirs = equirect_dirs(256, 512);
  const Vec3 d = dirs.at(128, 256);
  EXPECT_NEAR(p.at(128, 256), 2.0 / d.x(), 1e-9);
  EXPECT_NEAR(p.at(128, 256), 2.0, 2.0 * 1e-3);
}

TEST(Panorama, OutsideViewpointRejected) {
  const Room r = make_shoebox(Vec3(4, 5, 3), 0.2);
  try {
    render_panorama_depth(r, Vec3(10, 10, 10));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidViewpoint);
  }
}

TEST(Panorama, MinDepthBoundedByNearestSurface) {
  const Room r = make_shoebox(Vec3(4, 5, 3), 0.2);
  const Vec3 rcv(1.0, 3.5, 1.2);
  const PanoramaDepth p = render_panorama_depth(r, rcv);
  const double nearest = std::min({rcv.x(), 4 - rcv.x(), rcv.y(), 5 - rcv.y(), rcv.z(), 3 - rcv.z()});
  const double mn = *std::min_element(p.values.begin(), p.values.end());
  EXPECT_GE(mn, nearest - 1e-12);
  // One pixel of angular quantization.
  const double pixel = std::numbers::pi / 256;
  EXPECT_LE(mn, nearest / std::cos(pixel));
}

TEST(Panorama, MatchesExhaustiveRayOracle) {
  const auto fp = l_footprint();
  const Room r = make_polygonal_room(fp, 3.0, std::vector<double>(8, 0.3));
  const Vec3 rcv(1.5, 3.8, 1.4);
  const int h = 32, w = 64;
  const PanoramaDepth p = render_panorama_depth(r, rcv, h, w);
  const Grid3 dirs = equirect_dirs(h, w);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const double want = oracle_ray_depth(fp, 3.0, rcv, dirs.at(i, j));
      ASSERT_TRUE(std::isfinite(want));
      EXPECT_NEAR(p.at(i, j), want, 1e-5 * want) << i << "," << j;
    }
  }
}

TEST(Coords, ScalingAndPlaneMembership) {
  const Room r = make_shoebox(Vec3(4, 5, 3), 0.2);
  const Vec3 rcv(1.3, 2.2, 1.7);
  const PanoramaDepth p = render_panorama_depth(r, rcv, 64, 128);
  const CoordMap c = depth_to_coords(p);
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 128; ++j) {
      EXPECT_NEAR(c.at(i, j).norm(), p.at(i, j), 1e-9);
      const Vec3 w = c.at(i, j) + rcv;
      const double dev = std::min({std::abs(w.x()), std::abs(w.x() - 4), std::abs(w.y()), std::abs(w.y() - 5),
                                   std::abs(w.z()), std::abs(w.z() - 3)});
      EXPECT_LT(dev, 1e-4);
    }
  }
}

TEST(ReflectionMaps, Identities) {
  const Room r = make_shoebox(Vec3(4, 5, 3), 0.2);
  const Vec3 rcv(2, 2, 1.5);
  const CoordMap c = depth_to_coords(render_panorama_depth(r, rcv, 16, 32));
  const ReflectionMaps self = build_reflection_maps(c, rcv, rcv, {});
  for (std::size_t i = 0; i < c.data.size(); ++i) EXPECT_DOUBLE_EQ(self.source_map.data[i], -c.data[i]);

  const Vec3 src(3, 4, 1.2);
  const ReflectionMaps m = build_reflection_maps(c, rcv, src, {Vec3(1, 1, 1)});
  ASSERT_EQ(m.reference_maps.size(), 1u);
  const Vec3 rel = src - rcv;
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 32; ++j) {
      EXPECT_TRUE((m.source_map.at(i, j) + c.at(i, j)).isApprox(rel, 1e-12));
      EXPECT_NEAR(m.source_map.at(i, j).norm(), (rel - c.at(i, j)).norm(), 1e-12);
      EXPECT_EQ(m.receiver_map.at(i, j), c.at(i, j));
    }
  }
}

}  // namespace
}  // namespace roomecho
