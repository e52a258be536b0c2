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
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace roomecho {

// Seeded generator with platform-independent draws. std::*_distribution
// output is implementation-defined, so the few draws we need are derived
// directly from the mt19937_64 bit stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  double normal();

  std::mt19937_64& engine() { return engine_; }

  // Text snapshot of the full generator state, for checkpoints.
  std::string state() const;
  void set_state(const std::string& text);

  static std::uint64_t mix(std::uint64_t x);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Order-sensitive hash used to derive per-item seeds from composite keys.
class SeedHasher {
 public:
  explicit SeedHasher(std::uint64_t seed) : state_(Rng::mix(seed)) {}
  SeedHasher& add(std::uint64_t v);
  SeedHasher& add(double v);
  SeedHasher& add(std::string_view s);
  SeedHasher& add(std::span<const double> vs);
  std::uint64_t value() const { return Rng::mix(state_); }

 private:
  std::uint64_t state_;
};

}  // namespace roomecho
