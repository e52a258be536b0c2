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
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "roomecho/model.hpp"
#include "roomecho/optim.hpp"

namespace roomecho {

nlohmann::json to_json(const ModelConfig& cfg);
// Missing keys keep their defaults; unknown keys are a kConfig error.
ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig base = {});

struct TrainState {
  std::int64_t step = 0;
  std::string rng_state;
  std::vector<double> losses;
};

struct TensorRecord {
  std::string name;
  ad::Shape shape;
  std::vector<float> values;
};

// A checkpoint directory holds checkpoint.json (configuration, tensor names,
// shapes and byte offsets) and tensors.f32 (little-endian float32 blob).
struct Checkpoint {
  ModelConfig model;
  std::vector<TensorRecord> params;
  std::vector<TensorRecord> adam_m;  // empty without optimizer state
  std::vector<TensorRecord> adam_v;
  AdamConfig adam;
  std::int64_t adam_steps = 0;
  TrainState state;
  nlohmann::json extra = nlohmann::json::object();
};

inline constexpr int kCheckpointFormatVersion = 1;

void save_checkpoint(const std::filesystem::path& dir, const XRir<float>& model,
                     const Adam<float>* optimizer, const TrainState& state,
                     const nlohmann::json& extra = nlohmann::json::object());
Checkpoint load_checkpoint(const std::filesystem::path& dir);

// Copies stored tensors into `model` (and `optimizer` when given), checking
// names and shapes.
void restore_model(const Checkpoint& ckpt, XRir<float>& model);
void restore_optimizer(const Checkpoint& ckpt, Adam<float>& optimizer);
XRir<float> model_from_checkpoint(const Checkpoint& ckpt);

}  // namespace roomecho
