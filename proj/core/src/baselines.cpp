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

#include "roomecho/baselines.hpp"

#include <algorithm>

#include "roomecho/dsp.hpp"
#include "roomecho/error.hpp"
#include "roomecho/random.hpp"

namespace roomecho {

ReferenceSet make_reference_set(std::vector<RIRRecord> records) {
  require(!records.empty(), ErrorCode::kShape, "reference set needs at least one record");
  ReferenceSet set;
  for (const auto& r : records) {
    require((r.receiver - records.front().receiver).norm() <= 1e-9, ErrorCode::kShape,
            "reference records must share one receiver");
    set.distances.push_back((r.source - r.receiver).norm());
  }
  set.records = std::move(records);
  return set;
}

std::size_t random_pick(std::size_t n, std::uint64_t seed) {
  require(n > 0, ErrorCode::kEmptyDataset, "cannot sample from an empty dataset");
  Rng rng(seed);
  return rng.index(n);
}

const RIRRecord& predict_random_across(std::span<const RIRRecord> dataset, std::uint64_t seed) {
  return dataset[random_pick(dataset.size(), seed)];
}

const RIRRecord& predict_random_same(std::span<const RIRRecord> dataset, const std::string& room_id,
                                     std::uint64_t seed) {
  std::vector<std::size_t> in_room;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].room_id == room_id) in_room.push_back(i);
  }
  require(!in_room.empty(), ErrorCode::kEmptyDataset, "room " + room_id + " has no records");
  return dataset[in_room[random_pick(in_room.size(), seed)]];
}

int nearest_reference(const ReferenceSet& refs, const Vec3& target_source) {
  int best = 0;
  double best_d = (refs.records[0].source - target_source).norm();
  for (int k = 1; k < refs.k(); ++k) {
    const double d = (refs.records[k].source - target_source).norm();
    if (d < best_d) {
      best = k;
      best_d = d;
    }
  }
  return best;
}

std::vector<double> interpolation_weights(const ReferenceSet& refs, const Vec3& target_source) {
  std::vector<double> w(refs.k());
  double total = 0.0;
  for (int k = 0; k < refs.k(); ++k) {
    w[k] = 1.0 / std::max((refs.records[k].source - target_source).norm(), 1e-6);
    total += w[k];
  }
  for (double& x : w) x /= total;
  return w;
}

namespace {

std::vector<double> aligned(const ReferenceSet& refs, int k, const Vec3& target_source, bool align,
                            const SimConfig& cfg) {
  const auto& wf = refs.records[k].waveform;
  if (!align) return wf;
  return time_shift_align(wf, (target_source - refs.receiver()).norm(), refs.distances[k], cfg);
}

}  // namespace

std::vector<double> predict_nearest(const ReferenceSet& refs, const Vec3& target_source, bool align,
                                    const SimConfig& cfg) {
  return aligned(refs, nearest_reference(refs, target_source), target_source, align, cfg);
}

std::vector<double> predict_linear_interp(const ReferenceSet& refs, const Vec3& target_source,
                                          bool align, const SimConfig& cfg) {
  const auto w = interpolation_weights(refs, target_source);
  std::vector<double> out(refs.records[0].waveform.size(), 0.0);
  for (int k = 0; k < refs.k(); ++k) {
    const auto wf = aligned(refs, k, target_source, align, cfg);
    require(wf.size() == out.size(), ErrorCode::kShape, "reference waveforms differ in length");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w[k] * wf[i];
  }
  return out;
}

}  // namespace roomecho
