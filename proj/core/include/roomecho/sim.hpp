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
#include <string>
#include <vector>

#include "roomecho/geometry.hpp"

namespace roomecho {

struct SimConfig {
  double sample_rate = 22050.0;
  int rir_length = 9600;
  double speed_of_sound = 343.0;
  int max_reflection_order = 4;
  bool tail_enabled = true;
  // Number of stochastic arrivals in the diffuse tail; 0 draws dense
  // per-sample Gaussian noise instead.
  int tail_rays = 8192;
  std::uint64_t seed = 0;
  // Placement checks applied by simulate_rir.
  double min_source_receiver_distance = 0.5;
  double min_surface_clearance = 0.5;
};

struct ImageSource {
  Vec3 position = Vec3::Zero();
  int order = 0;
  double attenuation = 1.0;
  // Wall sequence (first bounce first). Empty for lattice images, which are
  // valid for every interior receiver.
  std::vector<int> walls;
  // Other wall sequences that produce the same position.
  std::vector<std::vector<int>> alternatives;
};

struct RIRRecord {
  std::vector<double> waveform;
  std::string room_id;
  Vec3 source = Vec3::Zero();
  Vec3 receiver = Vec3::Zero();
};

// Shoeboxes use the closed-form mirror lattice; other rooms use recursive
// mirroring restricted to images in front of the mirroring wall. Images with
// zero attenuation are dropped.
std::vector<ImageSource> enumerate_image_sources(const Room& room, const Vec3& source, int order);

// True when the specular path of `image` reaches `receiver` through the
// interior of every wall in its sequence without obstruction.
bool image_path_valid(const Room& room, const ImageSource& image, const Vec3& source,
                      const Vec3& receiver);

struct Arrival {
  double delay_samples = 0.0;
  double amplitude = 0.0;
  int order = 0;
};

// Visible specular arrivals (direct path included), sorted by delay.
std::vector<Arrival> image_source_arrivals(const Room& room, const Vec3& source,
                                           const Vec3& receiver, const SimConfig& cfg);

RIRRecord simulate_rir(const Room& room, const Vec3& source, const Vec3& receiver,
                       const SimConfig& cfg = {});

double sabine_t60(const Room& room);

// Validates cfg; throws kConfig.
void validate(const SimConfig& cfg);

}  // namespace roomecho
