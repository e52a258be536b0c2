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

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "roomecho/autodiff.hpp"
#include "roomecho/geometry.hpp"
#include "roomecho/random.hpp"

namespace roomecho {

struct ModelConfig {
  int k = 4;
  int pe_freqs_coord = 20;
  int pe_freqs_time = 10;
  int direct_dim = 256;
  int patch_dim = 512;
  int map_height = kPanoramaHeight;
  int map_width = kPanoramaWidth;
  int patch_height = 16;
  int patch_width = 32;
  int layers = 6;
  int heads = 8;
  int ffn_mult = 4;
  int ref_feature_dim = 512;
  // Residual encoder stage widths; the last equals ref_feature_dim.
  std::array<int, 4> encoder_widths = {64, 128, 256, 512};
  int time_hidden = 512;
  int bins = 63;
  int frames = 310;
  double lambda_ed = 0.01;
  // Initial scale of the time-basis output layer, kept small so the first
  // predictions stay near zero in the log domain.
  double time_basis_init_scale = 0.1;
  bool no_reference_rirs = false;
  bool no_direct_path = false;
  bool no_reflection_module = false;

  int fused_dim() const { return direct_dim + 2 * patch_dim + ref_feature_dim; }
  int target_concat_dim() const { return direct_dim + 2 * patch_dim; }
  int patch_rows() const { return map_height / patch_height; }
  int patch_cols() const { return map_width / patch_width; }
  int patch_count() const { return patch_rows() * patch_cols(); }
  int patch_size() const { return patch_height * patch_width * 3; }

  static ModelConfig full();
  // Smallest configuration that exercises every component.
  static ModelConfig tiny();
  // Reduced width for single-core training runs.
  static ModelConfig compact();
};

// Throws kConfig on an inconsistent configuration.
void validate(const ModelConfig& cfg);

// sin/cos(2^m * pi * x_d) for each component, component-major.
std::vector<double> posenc(std::span<const double> x, int n_freqs);

// All positions and maps are expressed in the receiver frame and divided by
// the room's bounding-box diagonal before they reach the network.
struct ModelInput {
  Vec3 source = Vec3::Zero();
  Vec3 receiver = Vec3::Zero();
  std::vector<Vec3> ref_sources;
  Grid3 source_map;
  Grid3 receiver_map;
  std::vector<Grid3> ref_maps;
  // Time-shift aligned log-magnitude reference spectrograms, bins x frames.
  std::vector<Eigen::MatrixXd> ref_specs;

  int k() const { return static_cast<int>(ref_specs.size()); }
};

// World-space observation for one target.
struct Observation {
  Vec3 source = Vec3::Zero();
  Vec3 receiver = Vec3::Zero();
  double scene_scale = 1.0;  // bounding-box diagonal in meters
  const CoordMap* coords = nullptr;  // full-resolution boundary points, receiver frame
  std::vector<Vec3> ref_sources;
  std::vector<std::span<const double>> ref_waveforms;
};

// Aligns and transforms the references, normalizes coordinates and builds the
// reflection maps at the model's map resolution.
ModelInput prepare_input(const Observation& obs, const ModelConfig& cfg);

// Named trainable tensors in creation order.
template <class T>
class ParamStore {
 public:
  ad::Var<T>& add(const std::string& name, ad::Shape shape, std::vector<T> values);
  const ad::Var<T>& get(const std::string& name) const;
  ad::Var<T>& get(const std::string& name);
  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  std::size_t size() const { return entries_.size(); }
  const std::string& name(std::size_t i) const { return entries_[i].first; }
  ad::Var<T>& at(std::size_t i) { return entries_[i].second; }
  const ad::Var<T>& at(std::size_t i) const { return entries_[i].second; }
  std::size_t scalar_count() const;
  void zero_grad();

 private:
  std::vector<std::pair<std::string, ad::Var<T>>> entries_;
  std::map<std::string, std::size_t> index_;
};

template <class T>
struct ForwardTrace {
  ad::Var<T> g_dir;
  std::vector<ad::Var<T>> g_ref_dir;
  ad::Var<T> g_prime_receiver;  // patch tokens after the transformer
  ad::Var<T> g_s_rf;
  ad::Var<T> g_r_rf;
  std::vector<ad::Var<T>> g_ref_rf;
  std::vector<ad::Var<T>> f_a;
  ad::Var<T> h_t;
  ad::Var<T> h_ref;
  ad::Var<T> attention;  // [K,1]
  ad::Var<T> z;
  ad::Var<T> time_basis;
  ad::Var<T> weights;
  ad::Var<T> s_pred;
};

template <class T>
class XRir {
 public:
  XRir(const ModelConfig& cfg, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  ModelConfig& mutable_config() { return cfg_; }
  ParamStore<T>& params() { return params_; }
  const ParamStore<T>& params() const { return params_; }
  std::size_t parameter_count() const { return params_.scalar_count(); }

  ad::Var<T> direct_path_feature(const Vec3& source, const Vec3& receiver) const;
  // `tokens` receives the Np x C_p patch features before the patch projection.
  ad::Var<T> reflection_feature(const Grid3& map, ad::Var<T>* tokens = nullptr) const;
  ad::Var<T> encode_reference_rir(const Eigen::MatrixXd& log_magnitude) const;
  // h_t [1,C] from the target concat.
  ad::Var<T> target_projection(const ad::Var<T>& target_concat) const;
  ad::Var<T> time_basis() const;

  ForwardTrace<T> forward(const ModelInput& input) const;

 private:
  ad::Var<T> linear(const std::string& name, const ad::Var<T>& x) const;
  ad::Var<T> mlp2(const std::string& name, const ad::Var<T>& x) const;
  ad::Var<T> transformer_block(int layer, const ad::Var<T>& x) const;
  ad::Var<T> conv(const std::string& name, const ad::Var<T>& x, int stride, int pad) const;

  void add_linear(const std::string& name, int in, int out, double scale, Rng& rng);
  void add_conv(const std::string& name, int in, int out, int kernel, Rng& rng);

  ModelConfig cfg_;
  ParamStore<T> params_;
  ad::Var<T> time_encoding_;  // [T, 2 * pe_freqs_time], constant
};

// Z = softmax(H h_t^T / sqrt(C)) .* H; `attention` receives the softmax.
template <class T>
ad::Var<T> attend(const ad::Var<T>& h_t, const ad::Var<T>& h_ref, ad::Var<T>* attention = nullptr);

// W = Z T_b^T.
template <class T>
ad::Var<T> predict_weights(const ad::Var<T>& z, const ad::Var<T>& time_basis);

// S_pred[f,t] = sum_k W[k,t] S_k[f,t].
template <class T>
ad::Var<T> compose_prediction(const ad::Var<T>& weights, const std::vector<Eigen::MatrixXd>& refs);

template <class T>
ad::Var<T> to_var(const Eigen::MatrixXd& m);
template <class T>
Eigen::MatrixXd to_matrix(const ad::Var<T>& v);

struct LossParts {
  double stft = 0.0;
  double edc = 0.0;
  double total = 0.0;
};

// mean |exp(S_pred) - exp(S_gt)| + lambda * mean |EDC(S_pred) - EDC(S_gt)|.
template <class T>
ad::Var<T> loss_total(const ad::Var<T>& s_pred, const Eigen::MatrixXd& s_gt, double lambda_ed,
                      LossParts* parts = nullptr);

struct TrainingExample {
  ModelInput input;
  Eigen::MatrixXd target;  // log-magnitude, bins x frames
};

// Accumulates d(mean loss)/d(param) over the batch into the parameter
// gradients (zeroed first) and returns the mean loss. Throws kNumeric on a
// non-finite loss.
template <class T>
LossParts gradients(XRir<T>& model, std::span<const TrainingExample> batch);

}  // namespace roomecho
