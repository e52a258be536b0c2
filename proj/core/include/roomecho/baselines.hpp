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
#include <span>
#include <string>
#include <vector>

#include "roomecho/sim.hpp"

namespace roomecho {

// K reference recordings at one receiver.
struct ReferenceSet {
  std::vector<RIRRecord> records;
  std::vector<double> distances;  // source-receiver distance per record

  const Vec3& receiver() const { return records.front().receiver; }
  int k() const { return static_cast<int>(records.size()); }
};

// Throws kShape if empty or if receivers disagree by more than 1e-9 m.
ReferenceSet make_reference_set(std::vector<RIRRecord> records);

// Uniform draw over [0, n) keyed by seed. Throws kEmptyDataset when n == 0.
std::size_t random_pick(std::size_t n, std::uint64_t seed);

const RIRRecord& predict_random_across(std::span<const RIRRecord> dataset, std::uint64_t seed);
const RIRRecord& predict_random_same(std::span<const RIRRecord> dataset, const std::string& room_id,
                                     std::uint64_t seed);

// Index of the reference source closest to `target_source`; ties go low.
int nearest_reference(const ReferenceSet& refs, const Vec3& target_source);
// Inverse-distance weights (floor 1e-6 m), normalized to sum to 1.
std::vector<double> interpolation_weights(const ReferenceSet& refs, const Vec3& target_source);

// Both predictors shift each reference to the target's direct-path distance
// when `align` is set.
std::vector<double> predict_nearest(const ReferenceSet& refs, const Vec3& target_source,
                                    bool align = true, const SimConfig& cfg = {});
std::vector<double> predict_linear_interp(const ReferenceSet& refs, const Vec3& target_source,
                                          bool align = true, const SimConfig& cfg = {});

}  // namespace roomecho
