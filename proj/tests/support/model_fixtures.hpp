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

// Synthetic inputs and a finite-difference gradient checker for model tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "roomecho/model.hpp"
#include "roomecho/random.hpp"

namespace roomecho::testing {

inline Grid3 random_grid(int h, int w, Rng& rng, double scale = 0.5) {
  Grid3 g(h, w);
  for (double& v : g.data) v = scale * rng.normal();
  return g;
}

inline ModelInput random_input(const ModelConfig& cfg, int k, std::uint64_t seed) {
  Rng rng(seed);
  ModelInput in;
  in.source = Vec3(rng.uniform(-.5, .5), rng.uniform(-.5, .5), rng.uniform(-.2, .2));
  in.receiver = Vec3::Zero();
  in.source_map = random_grid(cfg.map_height, cfg.map_width, rng);
  in.receiver_map = random_grid(cfg.map_height, cfg.map_width, rng);
  for (int i = 0; i < k; ++i) {
    in.ref_sources.emplace_back(rng.uniform(-.5, .5), rng.uniform(-.5, .5), rng.uniform(-.2, .2));
    in.ref_maps.push_back(random_grid(cfg.map_height, cfg.map_width, rng));
    Eigen::MatrixXd s(cfg.bins, cfg.frames);
    for (Eigen::Index j = 0; j < s.size(); ++j) s.data()[j] = -4.0 + rng.normal();
    in.ref_specs.push_back(s);
  }
  return in;
}

inline Eigen::MatrixXd random_target(const ModelConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd s(cfg.bins, cfg.frames);
  for (Eigen::Index j = 0; j < s.size(); ++j) s.data()[j] = -3.0 + 0.8 * rng.normal();
  return s;
}

struct GradCheckResult {
  int checked = 0;
  double max_rel_error = 0.0;
  std::vector<double> rel_errors;
};

// Relative error per sampled scalar: |a - n| / max(|a|, |n|, floor). The
// floor keeps parameters whose gradient is numerically zero from dominating.
inline double rel_error(double a, double n, double floor) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
}

// Checks analytic gradients of `loss` (a function of the store's current
// values) against central differences on `count` randomly sampled scalars.
inline GradCheckResult check_gradients(ParamStore<double>& store, const std::function<double()>& loss,
                                       const std::function<void()>& analytic, int count,
                                       std::uint64_t seed, double step = 1e-4,
                                       double floor = 1e-7) {
  analytic();
  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t p = 0; p < store.size(); ++p) {
    for (std::size_t i = 0; i < store.at(p).size(); ++i) all.emplace_back(p, i);
  }
  Rng rng(seed);
  GradCheckResult r;
  // Sample without replacement, but make sure every tensor is represented
  // when there are enough draws.
  std::vector<std::pair<std::size_t, std::size_t>> picks;
  for (std::size_t p = 0; p < store.size() && static_cast<int>(picks.size()) < count; ++p) {
    picks.emplace_back(p, rng.index(store.at(p).size()));
  }
  while (static_cast<int>(picks.size()) < count) picks.push_back(all[rng.index(all.size())]);
  for (const auto& [p, i] : picks) {
    auto& v = store.at(p).mutable_value();
    const double a = store.at(p).grad()[i];
    const double orig = v[i];
    v[i] = orig + step;
    const double lp = loss();
    v[i] = orig - step;
    const double lm = loss();
    v[i] = orig;
    const double n = (lp - lm) / (2 * step);
    const double e = rel_error(a, n, floor);
    r.rel_errors.push_back(e);
    r.max_rel_error = std::max(r.max_rel_error, e);
    ++r.checked;
  }
  return r;
}

}  // namespace roomecho::testing
