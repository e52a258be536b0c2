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
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "roomecho/dataset.hpp"

namespace roomecho {

enum class SplitMode { kSeen, kUnseen };

std::string_view to_string(SplitMode mode);
SplitMode split_mode_from_string(std::string_view s);

using ReceiverKey = std::pair<std::string, int>;  // (room id, receiver index)

struct SplitSpec {
  SplitMode mode = SplitMode::kUnseen;
  std::uint64_t seed = 0;
  double test_fraction = 0.1;
  std::vector<ReceiverKey> train;
  std::vector<ReceiverKey> test;
  std::vector<std::string> test_rooms;  // unseen mode only
};

// Seen mode holds out a fraction of receivers in every room; unseen mode
// holds out a fraction of rooms per category. Each side gets at least one
// member. Throws kSplitInfeasible when a room (seen) or category (unseen)
// has fewer than two members.
SplitSpec make_split(const DatasetManifest& manifest, SplitMode mode, std::uint64_t seed,
                     double test_fraction = 0.1);

nlohmann::json to_json(const SplitSpec& s);
SplitSpec split_from_json(const nlohmann::json& j);

// A prediction target: one non-reference source heard at one receiver.
struct Example {
  std::string id;
  std::size_t room = 0;
  int receiver = 0;
  int source = 0;
};

// Targets for every receiver on one side, in split order then source order.
std::vector<Example> split_examples(const Dataset& data, const std::vector<ReceiverKey>& side);

}  // namespace roomecho
