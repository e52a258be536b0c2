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
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <vector>

#include "roomecho/checkpoint.hpp"
#include "roomecho/dataset.hpp"
#include "roomecho/model.hpp"
#include "roomecho/optim.hpp"
#include "roomecho/split.hpp"

namespace roomecho {

struct TrainConfig {
  std::int64_t steps = 1000;
  int batch_size = 16;
  AdamConfig adam;
  std::uint64_t seed = 0;
  // Save every N steps in addition to the final save; 0 saves only at the end.
  std::int64_t checkpoint_every = 0;
  // Wall-clock cap in seconds; 0 disables it.
  double max_seconds = 0.0;
};

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

// Receiver-frame boundary maps at model resolution, computed on first use.
class CoordCache {
 public:
  CoordCache(const Dataset& data, int height, int width)
      : data_(data), height_(height), width_(width) {}
  const CoordMap& get(std::size_t room, int receiver);

 private:
  const Dataset& data_;
  int height_;
  int width_;
  std::mutex mu_;
  std::map<std::pair<std::size_t, int>, std::unique_ptr<CoordMap>> maps_;
};

// Uniformly picks k distinct reference candidates of a room.
std::vector<int> choose_references(const Placement& placement, int k, Rng& rng);

ModelInput build_model_input(const Dataset& data, CoordCache& coords, const ModelConfig& cfg,
                             std::size_t room, int receiver, int source,
                             const std::vector<int>& references);

struct StepLog {
  std::int64_t step = 0;
  LossParts loss;
  double grad_norm = 0.0;
};

class Trainer {
 public:
  Trainer(const Dataset& data, const SplitSpec& split, const ModelConfig& model_cfg,
          const TrainConfig& train_cfg);

  // Continues from a checkpoint written by this trainer.
  void resume(const Checkpoint& ckpt);

  // Runs until train_cfg.steps total steps (or the time cap). Writes
  // checkpoints and loss.csv to `out_dir` when it is non-empty.
  void run(const std::filesystem::path& out_dir = {},
           const std::function<void(const StepLog&)>& on_step = {});

  XRir<float>& model() { return model_; }
  const TrainState& state() const { return state_; }
  void save(const std::filesystem::path& dir) const;

 private:
  StepLog step_once();

  const Dataset& data_;
  SplitSpec split_;
  TrainConfig cfg_;
  XRir<float> model_;
  Adam<float> opt_;
  Rng rng_;
  TrainState state_;
  CoordCache coords_;
  std::vector<std::pair<std::size_t, int>> train_receivers_;
  std::vector<std::string> log_lines_;
};

}  // namespace roomecho
