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

#include "roomecho/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "roomecho/dsp.hpp"
#include "roomecho/error.hpp"
#include "roomecho/io.hpp"

namespace roomecho {

using nlohmann::json;

json to_json(const TrainConfig& c) {
  return json{{"steps", c.steps},
              {"batch_size", c.batch_size},
              {"learning_rate", c.adam.learning_rate},
              {"beta1", c.adam.beta1},
              {"beta2", c.adam.beta2},
              {"epsilon", c.adam.epsilon},
              {"clip_norm", c.adam.clip_norm},
              {"seed", c.seed},
              {"checkpoint_every", c.checkpoint_every},
              {"max_seconds", c.max_seconds}};
}

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
  require(j.is_object(), ErrorCode::kConfig, "train config must be an object");
  const json known = to_json(c);
  for (const auto& [key, _] : j.items()) {
    require(known.contains(key), ErrorCode::kConfig, "unknown train config key '" + key + "'");
  }
  try {
    c.steps = j.value("steps", c.steps);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.adam.learning_rate = j.value("learning_rate", c.adam.learning_rate);
    c.adam.beta1 = j.value("beta1", c.adam.beta1);
    c.adam.beta2 = j.value("beta2", c.adam.beta2);
    c.adam.epsilon = j.value("epsilon", c.adam.epsilon);
    c.adam.clip_norm = j.value("clip_norm", c.adam.clip_norm);
    c.seed = j.value("seed", c.seed);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    c.max_seconds = j.value("max_seconds", c.max_seconds);
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, std::string("train config: ") + e.what());
  }
  require(c.steps >= 0 && c.batch_size >= 1, ErrorCode::kConfig, "steps >= 0 and batch_size >= 1 required");
  return c;
}

const CoordMap& CoordCache::get(std::size_t room, int receiver) {
  std::lock_guard lock(mu_);
  auto& slot = maps_[{room, receiver}];
  if (!slot) slot = std::make_unique<CoordMap>(downsample(data_.coords(room, receiver), height_, width_));
  return *slot;
}

std::vector<int> choose_references(const Placement& placement, int k, Rng& rng) {
  std::vector<int> pool = placement.reference_source_indices;
  require(k >= 1 && k <= static_cast<int>(pool.size()), ErrorCode::kConfig,
          "K = " + std::to_string(k) + " exceeds the " + std::to_string(pool.size()) +
              " reference candidates");
  for (int i = 0; i < k; ++i) {
    const std::size_t j = i + rng.index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

ModelInput build_model_input(const Dataset& data, CoordCache& coords, const ModelConfig& cfg,
                             std::size_t room, int receiver, int source,
                             const std::vector<int>& references) {
  const auto& p = data.placement(room);
  Observation obs;
  obs.source = p.sources.at(source);
  obs.receiver = p.receivers.at(receiver);
  obs.scene_scale = data.room(room).bbox_diagonal();
  obs.coords = &coords.get(room, receiver);
  std::vector<std::vector<double>> waves;
  for (int r : references) {
    obs.ref_sources.push_back(p.sources.at(r));
    waves.push_back(data.waveform(room, receiver, r));
  }
  for (const auto& w : waves) obs.ref_waveforms.emplace_back(w);
  return prepare_input(obs, cfg);
}

Trainer::Trainer(const Dataset& data, const SplitSpec& split, const ModelConfig& model_cfg,
                 const TrainConfig& train_cfg)
    : data_(data),
      split_(split),
      cfg_(train_cfg),
      model_(model_cfg, train_cfg.seed),
      opt_(model_.params(), train_cfg.adam),
      rng_(SeedHasher(train_cfg.seed).add(std::string_view("train")).value()),
      coords_(data, model_cfg.map_height, model_cfg.map_width) {
  for (const auto& [room_id, rcv] : split.train) train_receivers_.emplace_back(data.room_index(room_id), rcv);
  require(!train_receivers_.empty(), ErrorCode::kEmptyDataset, "training split is empty");
  for (const auto& [room, rcv] : train_receivers_) {
    const auto& p = data.placement(room);
    require(model_cfg.k <= static_cast<int>(p.reference_source_indices.size()), ErrorCode::kConfig,
            "K = " + std::to_string(model_cfg.k) + " exceeds the reference candidates of room " +
                data.entry(room).id);
    require(p.sources.size() > p.reference_source_indices.size(), ErrorCode::kConfig,
            "room " + data.entry(room).id + " has no target sources");
  }
  state_.rng_state = rng_.state();
}

void Trainer::resume(const Checkpoint& ckpt) {
  restore_model(ckpt, model_);
  restore_optimizer(ckpt, opt_);
  state_ = ckpt.state;
  rng_.set_state(state_.rng_state);
}

StepLog Trainer::step_once() {
  std::vector<TrainingExample> batch;
  std::vector<std::string> ids;
  const auto& mcfg = model_.config();
  for (int b = 0; b < cfg_.batch_size; ++b) {
    const auto [room, rcv] = train_receivers_[rng_.index(train_receivers_.size())];
    const auto& p = data_.placement(room);
    std::vector<int> targets;
    for (int s = 0; s < static_cast<int>(p.sources.size()); ++s) {
      if (std::find(p.reference_source_indices.begin(), p.reference_source_indices.end(), s) ==
          p.reference_source_indices.end()) {
        targets.push_back(s);
      }
    }
    const int src = targets[rng_.index(targets.size())];
    const auto refs = choose_references(p, mcfg.k, rng_);
    TrainingExample ex;
    ex.input = build_model_input(data_, coords_, mcfg, room, rcv, src, refs);
    ex.target = stft_logmag(data_.waveform(room, rcv, src)).values;
    batch.push_back(std::move(ex));
    ids.push_back(data_.entry(room).id + "/r" + std::to_string(rcv) + "/s" + std::to_string(src));
  }
  StepLog log;
  try {
    log.loss = gradients(model_, std::span<const TrainingExample>(batch));
    log.grad_norm = opt_.step();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNumeric) throw;
    double sq = 0.0;
    for (std::size_t i = 0; i < model_.params().size(); ++i) {
      for (float v : model_.params().at(i).value()) sq += static_cast<double>(v) * v;
    }
    std::string joined;
    for (const auto& id : ids) joined += (joined.empty() ? "" : ",") + id;
    fail(ErrorCode::kNumeric, std::string(e.what()) + " at step " + std::to_string(state_.step) +
                                  "; batch " + joined + "; parameter norm " +
                                  format_double(std::sqrt(sq)));
  }
  log.step = ++state_.step;
  state_.losses.push_back(log.loss.total);
  state_.rng_state = rng_.state();
  return log;
}

void Trainer::save(const fs::path& dir) const {
  save_checkpoint(dir, model_, &opt_, state_,
                  json{{"train", to_json(cfg_)}, {"split", to_json(split_)},
                       {"dataset_seed", data_.manifest().seed}});
}

void Trainer::run(const fs::path& out_dir, const std::function<void(const StepLog&)>& on_step) {
  const auto start = std::chrono::steady_clock::now();
  auto flush_log = [&] {
    if (out_dir.empty()) return;
    std::string csv = "step,loss,stft_loss,edc_loss,grad_norm\n";
    for (const auto& l : log_lines_) csv += l;
    write_text(out_dir / "loss.csv", csv);
  };
  while (state_.step < cfg_.steps) {
    if (cfg_.max_seconds > 0.0) {
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (elapsed >= cfg_.max_seconds) break;
    }
    const StepLog log = step_once();
    log_lines_.push_back(std::to_string(log.step) + "," + format_double(log.loss.total) + "," +
                         format_double(log.loss.stft) + "," + format_double(log.loss.edc) + "," +
                         format_double(log.grad_norm) + "\n");
    if (on_step) on_step(log);
    if (!out_dir.empty() && cfg_.checkpoint_every > 0 && log.step % cfg_.checkpoint_every == 0) {
      save(out_dir / ("step-" + std::to_string(log.step)));
      flush_log();
    }
  }
  if (!out_dir.empty()) {
    save(out_dir / "final");
    flush_log();
  }
}

}  // namespace roomecho
