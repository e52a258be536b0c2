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

#include "roomecho/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "roomecho/error.hpp"
#include "roomecho/random.hpp"

namespace roomecho {

using nlohmann::json;

std::string_view to_string(SplitMode mode) { return mode == SplitMode::kSeen ? "seen" : "unseen"; }

SplitMode split_mode_from_string(std::string_view s) {
  if (s == "seen") return SplitMode::kSeen;
  if (s == "unseen") return SplitMode::kUnseen;
  fail(ErrorCode::kConfig, "split mode must be 'seen' or 'unseen', got '" + std::string(s) + "'");
}

namespace {

int held_out_count(int n, double fraction) {
  return std::clamp(static_cast<int>(std::lround(fraction * n)), 1, n - 1);
}

std::vector<int> shuffled(int n, Rng& rng) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.index(static_cast<std::size_t>(i) + 1)]);
  return order;
}

int receiver_count(const DatasetManifest& m, const std::string& room) {
  int n = 0;
  for (const auto& e : m.rirs) {
    if (e.room_id == room) n = std::max(n, e.receiver + 1);
  }
  return n;
}

}  // namespace

SplitSpec make_split(const DatasetManifest& m, SplitMode mode, std::uint64_t seed, double test_fraction) {
  require(test_fraction > 0.0 && test_fraction < 1.0, ErrorCode::kConfig,
          "test fraction must be in (0, 1)");
  require(!m.rooms.empty(), ErrorCode::kEmptyDataset, "manifest has no rooms");
  SplitSpec s;
  s.mode = mode;
  s.seed = seed;
  s.test_fraction = test_fraction;
  if (mode == SplitMode::kSeen) {
    for (const auto& room : m.rooms) {
      const int n = receiver_count(m, room.id);
      require(n >= 2, ErrorCode::kSplitInfeasible,
              "room " + room.id + " has fewer than two receivers");
      Rng rng(SeedHasher(seed).add(std::string_view("split-seen")).add(room.id).value());
      auto order = shuffled(n, rng);
      const int n_test = held_out_count(n, test_fraction);
      std::sort(order.begin(), order.begin() + n_test);
      std::sort(order.begin() + n_test, order.end());
      for (int i = 0; i < n; ++i) (i < n_test ? s.test : s.train).emplace_back(room.id, order[i]);
    }
  } else {
    std::map<std::string, std::vector<std::string>> by_category;
    std::vector<std::string> category_order;
    for (const auto& room : m.rooms) {
      if (!by_category.count(room.category)) category_order.push_back(room.category);
      by_category[room.category].push_back(room.id);
    }
    std::vector<std::string> test_rooms;
    for (const auto& cat : category_order) {
      const auto& rooms = by_category[cat];
      const int n = static_cast<int>(rooms.size());
      require(n >= 2, ErrorCode::kSplitInfeasible, "category " + cat + " has fewer than two rooms");
      Rng rng(SeedHasher(seed).add(std::string_view("split-unseen")).add(cat).value());
      const auto order = shuffled(n, rng);
      const int n_test = held_out_count(n, test_fraction);
      for (int i = 0; i < n_test; ++i) test_rooms.push_back(rooms[order[i]]);
    }
    for (const auto& room : m.rooms) {
      const bool is_test = std::find(test_rooms.begin(), test_rooms.end(), room.id) != test_rooms.end();
      if (is_test) s.test_rooms.push_back(room.id);
      const int n = receiver_count(m, room.id);
      for (int r = 0; r < n; ++r) (is_test ? s.test : s.train).emplace_back(room.id, r);
    }
  }
  return s;
}

json to_json(const SplitSpec& s) {
  auto side = [](const std::vector<ReceiverKey>& keys) {
    json a = json::array();
    for (const auto& [room, rcv] : keys) a.push_back({{"room_id", room}, {"receiver", rcv}});
    return a;
  };
  return json{{"mode", std::string(to_string(s.mode))},
              {"seed", s.seed},
              {"test_fraction", s.test_fraction},
              {"train", side(s.train)},
              {"test", side(s.test)},
              {"test_rooms", s.test_rooms}};
}

SplitSpec split_from_json(const json& j) {
  SplitSpec s;
  try {
    s.mode = split_mode_from_string(j.at("mode").get<std::string>());
    s.seed = j.at("seed").get<std::uint64_t>();
    s.test_fraction = j.at("test_fraction").get<double>();
    for (const auto& e : j.at("train")) s.train.emplace_back(e.at("room_id").get<std::string>(), e.at("receiver").get<int>());
    for (const auto& e : j.at("test")) s.test.emplace_back(e.at("room_id").get<std::string>(), e.at("receiver").get<int>());
    s.test_rooms = j.at("test_rooms").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string("split: ") + e.what());
  }
  for (const auto& t : s.test) {
    require(std::find(s.train.begin(), s.train.end(), t) == s.train.end(), ErrorCode::kFormat,
            "split sides overlap");
  }
  return s;
}

std::vector<Example> split_examples(const Dataset& data, const std::vector<ReceiverKey>& side) {
  std::vector<Example> out;
  for (const auto& [room_id, rcv] : side) {
    const std::size_t room = data.room_index(room_id);
    const auto& p = data.placement(room);
    for (int s = 0; s < static_cast<int>(p.sources.size()); ++s) {
      if (std::find(p.reference_source_indices.begin(), p.reference_source_indices.end(), s) !=
          p.reference_source_indices.end()) {
        continue;
      }
      out.push_back({room_id + "/r" + std::to_string(rcv) + "/s" + std::to_string(s), room, rcv, s});
    }
  }
  return out;
}

}  // namespace roomecho
