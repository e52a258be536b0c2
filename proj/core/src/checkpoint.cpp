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

#include "roomecho/checkpoint.hpp"

#include <fstream>

#include "roomecho/error.hpp"
#include "roomecho/io.hpp"

namespace roomecho {

using nlohmann::json;

json to_json(const ModelConfig& c) {
  return json{{"k", c.k},
              {"pe_freqs_coord", c.pe_freqs_coord},
              {"pe_freqs_time", c.pe_freqs_time},
              {"direct_dim", c.direct_dim},
              {"patch_dim", c.patch_dim},
              {"map_height", c.map_height},
              {"map_width", c.map_width},
              {"patch_height", c.patch_height},
              {"patch_width", c.patch_width},
              {"layers", c.layers},
              {"heads", c.heads},
              {"ffn_mult", c.ffn_mult},
              {"ref_feature_dim", c.ref_feature_dim},
              {"encoder_widths", c.encoder_widths},
              {"time_hidden", c.time_hidden},
              {"bins", c.bins},
              {"frames", c.frames},
              {"lambda_ed", c.lambda_ed},
              {"time_basis_init_scale", c.time_basis_init_scale},
              {"no_reference_rirs", c.no_reference_rirs},
              {"no_direct_path", c.no_direct_path},
              {"no_reflection_module", c.no_reflection_module}};
}

ModelConfig model_config_from_json(const json& j, ModelConfig c) {
  require(j.is_object(), ErrorCode::kConfig, "model config must be an object");
  const json known = to_json(c);
  for (const auto& [key, _] : j.items()) {
    require(known.contains(key), ErrorCode::kConfig, "unknown model config key '" + key + "'");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("k", c.k);
    get("pe_freqs_coord", c.pe_freqs_coord);
    get("pe_freqs_time", c.pe_freqs_time);
    get("direct_dim", c.direct_dim);
    get("patch_dim", c.patch_dim);
    get("map_height", c.map_height);
    get("map_width", c.map_width);
    get("patch_height", c.patch_height);
    get("patch_width", c.patch_width);
    get("layers", c.layers);
    get("heads", c.heads);
    get("ffn_mult", c.ffn_mult);
    get("ref_feature_dim", c.ref_feature_dim);
    get("encoder_widths", c.encoder_widths);
    get("time_hidden", c.time_hidden);
    get("bins", c.bins);
    get("frames", c.frames);
    get("lambda_ed", c.lambda_ed);
    get("time_basis_init_scale", c.time_basis_init_scale);
    get("no_reference_rirs", c.no_reference_rirs);
    get("no_direct_path", c.no_direct_path);
    get("no_reflection_module", c.no_reflection_module);
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, std::string("model config: ") + e.what());
  }
  validate(c);
  return c;
}

namespace {

constexpr const char* kManifestName = "checkpoint.json";
constexpr const char* kBlobName = "tensors.f32";

json write_group(std::ofstream& blob, std::uint64_t& offset, const ParamStore<float>& params,
                 const std::vector<std::vector<float>>* values) {
  json list = json::array();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& v = values ? (*values)[i] : params.at(i).value();
    list.push_back({{"name", params.name(i)},
                    {"shape", params.at(i).shape()},
                    {"offset", offset},
                    {"count", v.size()}});
    offset += append_f32(blob, std::span<const float>(v));
  }
  return list;
}

std::vector<TensorRecord> read_group(const json& list, const fs::path& blob) {
  std::vector<TensorRecord> out;
  for (const auto& e : list) {
    TensorRecord r;
    r.name = e.at("name").get<std::string>();
    r.shape = e.at("shape").get<ad::Shape>();
    const auto count = e.at("count").get<std::size_t>();
    require(count == ad::element_count(r.shape), ErrorCode::kFormat,
            "checkpoint tensor " + r.name + " count does not match its shape");
    r.values = read_f32(blob, e.at("offset").get<std::uint64_t>(), count);
    out.push_back(std::move(r));
  }
  return out;
}

void copy_group(const std::vector<TensorRecord>& src, const ParamStore<float>& params,
                const std::function<std::vector<float>&(std::size_t)>& dst) {
  require(src.size() == params.size(), ErrorCode::kFormat,
          "checkpoint holds " + std::to_string(src.size()) + " tensors, model has " +
              std::to_string(params.size()));
  for (std::size_t i = 0; i < src.size(); ++i) {
    require(src[i].name == params.name(i) && src[i].shape == params.at(i).shape(),
            ErrorCode::kFormat,
            "checkpoint tensor " + src[i].name + " " + ad::shape_string(src[i].shape) +
                " does not match " + params.name(i) + " " +
                ad::shape_string(params.at(i).shape()));
    dst(i) = src[i].values;
  }
}

}  // namespace

void save_checkpoint(const fs::path& dir, const XRir<float>& model, const Adam<float>* opt,
                     const TrainState& state, const json& extra) {
  fs::create_directories(dir);
  std::ofstream blob(dir / kBlobName, std::ios::binary | std::ios::trunc);
  require(blob.good(), ErrorCode::kIo, "cannot write " + (dir / kBlobName).string());
  std::uint64_t offset = 0;
  json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["model"] = to_json(model.config());
  j["parameters"] = write_group(blob, offset, model.params(), nullptr);
  if (opt) {
    j["optimizer"] = {{"learning_rate", opt->config().learning_rate},
                      {"beta1", opt->config().beta1},
                      {"beta2", opt->config().beta2},
                      {"epsilon", opt->config().epsilon},
                      {"clip_norm", opt->config().clip_norm},
                      {"steps", opt->steps()},
                      {"m", write_group(blob, offset, model.params(), &opt->first_moments())},
                      {"v", write_group(blob, offset, model.params(), &opt->second_moments())}};
  }
  blob.close();
  require(!blob.fail(), ErrorCode::kIo, "failed to flush checkpoint tensors");
  j["state"] = {{"step", state.step}, {"rng_state", state.rng_state}, {"losses", state.losses}};
  j["extra"] = extra;
  j["blob"] = kBlobName;
  j["blob_bytes"] = offset;
  write_json(dir / kManifestName, j);
}

Checkpoint load_checkpoint(const fs::path& dir) {
  const json j = read_json(dir / kManifestName);
  Checkpoint c;
  try {
    require(j.at("format_version").get<int>() == kCheckpointFormatVersion, ErrorCode::kFormat,
            "unsupported checkpoint format version");
    const fs::path blob = dir / j.at("blob").get<std::string>();
    c.model = model_config_from_json(j.at("model"));
    c.params = read_group(j.at("parameters"), blob);
    if (j.contains("optimizer")) {
      const auto& o = j.at("optimizer");
      c.adam.learning_rate = o.at("learning_rate").get<double>();
      c.adam.beta1 = o.at("beta1").get<double>();
      c.adam.beta2 = o.at("beta2").get<double>();
      c.adam.epsilon = o.at("epsilon").get<double>();
      c.adam.clip_norm = o.at("clip_norm").get<double>();
      c.adam_steps = o.at("steps").get<std::int64_t>();
      c.adam_m = read_group(o.at("m"), blob);
      c.adam_v = read_group(o.at("v"), blob);
    }
    const auto& s = j.at("state");
    c.state.step = s.at("step").get<std::int64_t>();
    c.state.rng_state = s.at("rng_state").get<std::string>();
    c.state.losses = s.at("losses").get<std::vector<double>>();
    c.extra = j.value("extra", json::object());
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, (dir / kManifestName).string() + ": " + e.what());
  }
  return c;
}

void restore_model(const Checkpoint& ckpt, XRir<float>& model) {
  auto& params = model.params();
  copy_group(ckpt.params, params,
             [&](std::size_t i) -> std::vector<float>& { return params.at(i).mutable_value(); });
}

void restore_optimizer(const Checkpoint& ckpt, Adam<float>& opt) {
  require(!ckpt.adam_m.empty() && opt.first_moments().size() == ckpt.params.size(),
          ErrorCode::kFormat, "checkpoint has no matching optimizer state");
  // Moments share the parameters' names and shapes.
  ParamStore<float> layout;
  for (const auto& r : ckpt.params) layout.add(r.name, r.shape, std::vector<float>(r.values.size()));
  copy_group(ckpt.adam_m, layout, [&](std::size_t i) -> std::vector<float>& {
    return opt.first_moments().at(i);
  });
  copy_group(ckpt.adam_v, layout, [&](std::size_t i) -> std::vector<float>& {
    return opt.second_moments().at(i);
  });
  opt.set_steps(ckpt.adam_steps);
}

XRir<float> model_from_checkpoint(const Checkpoint& ckpt) {
  XRir<float> model(ckpt.model, 0);
  restore_model(ckpt, model);
  return model;
}

}  // namespace roomecho
