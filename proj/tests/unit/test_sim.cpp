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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "roomecho/error.hpp"
#include "roomecho/random.hpp"
#include "roomecho/sim.hpp"

namespace roomecho {
namespace {

std::array<double, 3> arr(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

// Equal-delay arrivals have no defined order; break ties by amplitude.
template <class A>
void sort_arrivals(std::vector<A>& v) {
  std::sort(v.begin(), v.end(), [](const A& a, const A& b) {
    if (std::abs(a.delay_samples - b.delay_samples) > 1e-9) return a.delay_samples < b.delay_samples;
    return a.amplitude < b.amplitude;
  });
}

double energy(const std::vector<double>& h) {
  double e = 0;
  for (double x : h) e += x * x;
  return e;
}

TEST(ImageSources, OrderZeroIsSource) {
  const Room r = make_shoebox(Vec3(4, 5, 3), 0.3);
  const auto imgs = enumerate_image_sources(r, Vec3(1, 2, 1), 0);
  ASSERT_EQ(imgs.size(), 1u);
  EXPECT_EQ(imgs[0].position, Vec3(1, 2, 1));
  EXPECT_EQ(imgs[0].attenuation, 1.0);
  const Room l = make_polygonal_room({{0, 0}, {6, 0}, {6, 3}, {3, 3}, {3, 5}, {0, 5}}, 3.0,
                                     std::vector<double>(8, 0.3));
  EXPECT_EQ(enumerate_image_sources(l, Vec3(1, 1, 1), 0).size(), 1u);
}

TEST(ImageSources, ShoeboxOrderOneHasSeven) {
  const Room r = make_shoebox(Vec3(4, 5, 3), 0.3);
  EXPECT_EQ(enumerate_image_sources(r, Vec3(1, 2, 1), 1).size(), 7u);
}

TEST(ImageSources, ShoeboxOrderTwoCountMatchesLattice) {
  const Room r = make_shoebox(Vec3(4, 5, 3), 0.3);
  const auto want = oracle::box_paths({4, 5, 3}, {.3, .3, .3, .3, .3, .3}, {1, 2, 1}, {3, 3, 2}, 2,
                                      22050, 343);
  EXPECT_EQ(enumerate_image_sources(r, Vec3(1, 2, 1), 2).size(), want.size());
  // 1 + 6 + (18 distinct second-order images).
  EXPECT_EQ(want.size(), 25u);
}

TEST(ImageSources, AttenuationInRange) {
  const Room r = make_shoebox(Vec3(4, 5, 3), std::array<double, 6>{.1, .2, .3, .4, .5, .6});
  for (const auto& img : enumerate_image_sources(r, Vec3(1, 2, 1), 3)) {
    EXPECT_GT(img.attenuation, 0.0);
    EXPECT_LE(img.attenuation, 1.0);
  }
}

TEST(ImageSources, ArrivalsMatchPathEnumeration) {
  const std::array<double, 6> alpha{.05, .2, .35, .5, .65, .8};
  const Room r = make_shoebox(Vec3(4, 5, 3), alpha);
  SimConfig cfg;
  cfg.max_reflection_order = 2;
  const Vec3 s(1.2, 3.1, 1.1), m(2.7, 1.4, 1.9);
  auto got = image_source_arrivals(r, s, m, cfg);
  auto want = oracle::box_paths({4, 5, 3}, alpha, arr(s), arr(m), 2, cfg.sample_rate, cfg.speed_of_sound);
  sort_arrivals(got);
  sort_arrivals(want);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_NEAR(got[i].delay_samples, want[i].delay_samples, 1e-9);
    EXPECT_NEAR(got[i].amplitude, want[i].amplitude, 1e-12 * want[i].amplitude);
    EXPECT_EQ(got[i].order, want[i].order);
  }
}

TEST(ImageSources, Reciprocity) {
  const Room r = make_shoebox(Vec3(4, 5, 3), std::array<double, 6>{.1, .2, .3, .4, .5, .6});
  SimConfig cfg;
  cfg.max_reflection_order = 3;
  const Vec3 a(1, 1, 1), b(3, 4, 2);
  auto ab = image_source_arrivals(r, a, b, cfg);
  auto ba = image_source_arrivals(r, b, a, cfg);
  sort_arrivals(ab);
  sort_arrivals(ba);
  ASSERT_EQ(ab.size(), ba.size());
  for (std::size_t i = 0; i < ab.size(); ++i) {
    EXPECT_NEAR(ab[i].delay_samples, ba[i].delay_samples, 1e-9);
    EXPECT_NEAR(ab[i].amplitude, ba[i].amplitude, 1e-12);
  }
}

TEST(ImageSources, LShapeRequiresVisibility) {
  const Room l = make_polygonal_room({{0, 0}, {6, 0}, {6, 3}, {3, 3}, {3, 5}, {0, 5}}, 3.0,
                                     std::vector<double>(8, 0.3));
  SimConfig cfg;
  cfg.max_reflection_order = 1;
  // Receiver in the arm, source in the far end of the base: the wall x=6
  // reflection path is unobstructed, the direct path is too.
  const auto arrivals = image_source_arrivals(l, Vec3(5, 1, 1.5), Vec3(1, 4, 1.5), cfg);
  EXPECT_GE(arrivals.size(), 1u);
  EXPECT_LT(arrivals.size(), 9u);
}

TEST(Simulate, FullyAbsorptiveIsFreeField) {
  const Room r = make_shoebox(Vec3(4, 5, 3), 1.0);
  SimConfig cfg;
  const Vec3 s(1, 1, 1), m(3, 3.5, 2);
  const auto rec = simulate_rir(r, s, m, cfg);
  ASSERT_EQ(rec.waveform.size(), 9600u);
  const double d = (s - m).norm();
  const auto peak = std::max_element(rec.waveform.begin(), rec.waveform.end());
  const long expected = std::lround(d / cfg.speed_of_sound * cfg.sample_rate);
  EXPECT_LE(std::abs(long(peak - rec.waveform.begin()) - expected), 1);
  // The two-tap split spreads the impulse over neighbours; their sum carries
  // the full amplitude.
  const std::size_t i = peak - rec.waveform.begin();
  const double total = rec.waveform[i - 1] + rec.waveform[i] + rec.waveform[i + 1];
  EXPECT_NEAR(total, 1.0 / (4 * std::numbers::pi * d), 0.02 / (4 * std::numbers::pi * d));
  int nonzero = 0;
  for (double x : rec.waveform) nonzero += x != 0.0;
  EXPECT_LE(nonzero, 2);
}

TEST(Simulate, CoincidentSourceRejected) {
  const Room r = make_shoebox(Vec3(4, 5, 3), 0.3);
  try {
    simulate_rir(r, Vec3(2, 2, 1), Vec3(2, 2, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidPlacement);
  }
}

TEST(Simulate, EnergyDecreasesWithAbsorption) {
  const Vec3 s(1, 1, 1), m(3, 3.5, 2);
  double prev = std::numeric_limits<double>::infinity();
  for (double a : {0.1, 0.5, 0.9}) {
    const double e = energy(simulate_rir(make_shoebox(Vec3(4, 5, 3), a), s, m).waveform);
    EXPECT_LT(e, prev);
    prev = e;
  }
}

TEST(Simulate, DirectEnergyInverseSquare) {
  SimConfig cfg;
  cfg.tail_enabled = false;
  cfg.max_reflection_order = 0;
  // 64 samples per meter: distances of whole meters land on the sample grid.
  cfg.sample_rate = 64 * cfg.speed_of_sound;
  const Room r = make_shoebox(Vec3(9, 9, 9), 0.3);
  const Vec3 m(1, 4.5, 4.5);
  const double e1 = energy(simulate_rir(r, Vec3(2, 4.5, 4.5), m, cfg).waveform);
  for (double d : {2.0, 4.0}) {
    const double e = energy(simulate_rir(r, Vec3(1 + d, 4.5, 4.5), m, cfg).waveform);
    EXPECT_NEAR(e / e1 * d * d, 1.0, 0.03);
  }
}

TEST(Simulate, Deterministic) {
  const Room r = make_shoebox(Vec3(4, 5, 3), 0.3, "det");
  SimConfig cfg;
  cfg.seed = 11;
  const auto a = simulate_rir(r, Vec3(1, 1, 1), Vec3(3, 3, 2), cfg);
  const auto b = simulate_rir(r, Vec3(1, 1, 1), Vec3(3, 3, 2), cfg);
  EXPECT_EQ(a.waveform, b.waveform);
  cfg.seed = 12;
  EXPECT_NE(a.waveform, simulate_rir(r, Vec3(1, 1, 1), Vec3(3, 3, 2), cfg).waveform);
}

TEST(Simulate, OnsetRespectsDirectPath) {
  const Room r = make_shoebox(Vec3(5, 6, 3), 0.25);
  SimConfig cfg;
  Rng rng(1);
  for (int i = 0; i < 5; ++i) {
    const Vec3 s(rng.uniform(.6, 4.4), rng.uniform(.6, 5.4), rng.uniform(.6, 2.4));
    const Vec3 m(rng.uniform(.6, 4.4), rng.uniform(.6, 5.4), rng.uniform(.6, 2.4));
    if ((s - m).norm() < 0.5) continue;
    const auto h = simulate_rir(r, s, m, cfg).waveform;
    const auto first = std::find_if(h.begin(), h.end(), [](double x) { return x != 0.0; }) - h.begin();
    EXPECT_GE(first, std::lround((s - m).norm() / cfg.speed_of_sound * cfg.sample_rate) - 1);
    for (double x : h) EXPECT_TRUE(std::isfinite(x));
  }
}

TEST(Sabine, HandArithmetic) {
  EXPECT_NEAR(sabine_t60(make_shoebox(Vec3(4, 5, 3), 0.2)), 0.161 * 60 / (0.2 * 94), 1e-12);
  EXPECT_NEAR(sabine_t60(make_shoebox(Vec3(4, 5, 3), 0.2)), 0.514, 1e-3);
  EXPECT_LT(sabine_t60(make_shoebox(Vec3(4, 5, 3), 1.0)), sabine_t60(make_shoebox(Vec3(4, 5, 3), 0.5)));
}

TEST(Sabine, ZeroAbsorptionRejected) {
  try {
    sabine_t60(make_shoebox(Vec3(4, 5, 3), 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfiniteReverberation);
  }
}

}  // namespace
}  // namespace roomecho
