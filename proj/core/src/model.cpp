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

#include "roomecho/model.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "roomecho/dsp.hpp"
#include "roomecho/error.hpp"

namespace roomecho {

using ad::Shape;
using ad::Var;

ModelConfig ModelConfig::full() { return ModelConfig{}; }

ModelConfig ModelConfig::tiny() {
  ModelConfig c;
  c.k = 2;
  c.direct_dim = 16;
  c.patch_dim = 16;
  c.map_height = 8;
  c.map_width = 16;
  c.patch_height = 4;
  c.patch_width = 4;
  c.layers = 1;
  c.heads = 2;
  c.ref_feature_dim = 16;
  c.encoder_widths = {4, 8, 8, 16};
  c.time_hidden = 16;
  return c;
}

ModelConfig ModelConfig::compact() {
  ModelConfig c;
  c.direct_dim = 32;
  c.patch_dim = 32;
  c.map_height = 32;
  c.map_width = 64;
  c.patch_height = 8;
  c.patch_width = 8;
  c.layers = 2;
  c.heads = 4;
  c.ref_feature_dim = 32;
  c.encoder_widths = {8, 16, 32, 32};
  c.time_hidden = 32;
  return c;
}

void validate(const ModelConfig& c) {
  auto check = [](bool ok, const std::string& what) {
    require(ok, ErrorCode::kConfig, "model config: " + what);
  };
  check(c.k >= 1, "k must be >= 1");
  check(c.pe_freqs_coord >= 1 && c.pe_freqs_time >= 1, "positional encodings need >= 1 frequency");
  check(c.direct_dim > 0 && c.patch_dim > 0 && c.ref_feature_dim > 0 && c.time_hidden > 0,
        "widths must be positive");
  check(c.patch_height > 0 && c.patch_width > 0 && c.map_height % c.patch_height == 0 &&
            c.map_width % c.patch_width == 0,
        "patches must tile the map");
  check(c.layers >= 0 && c.heads >= 1 && c.patch_dim % c.heads == 0,
        "patch_dim must be divisible by heads");
  check(c.ffn_mult >= 1, "ffn_mult must be >= 1");
  for (int w : c.encoder_widths) check(w > 0, "encoder widths must be positive");
  check(c.encoder_widths.back() == c.ref_feature_dim, "last encoder width must equal ref_feature_dim");
  check(c.bins > 0 && c.frames > 1, "spectrogram shape must be positive");
  check(c.lambda_ed >= 0.0, "lambda_ed must be non-negative");
}

std::vector<double> posenc(std::span<const double> x, int n_freqs) {
  std::vector<double> out;
  out.reserve(x.size() * 2 * n_freqs);
  for (double v : x) {
    for (int m = 0; m < n_freqs; ++m) {
      const double arg = std::ldexp(1.0, m) * std::numbers::pi * v;
      out.push_back(std::sin(arg));
      out.push_back(std::cos(arg));
    }
  }
  return out;
}

ModelInput prepare_input(const Observation& obs, const ModelConfig& cfg) {
  require(obs.coords != nullptr, ErrorCode::kShape, "observation has no coordinate map");
  require(obs.scene_scale > 0.0, ErrorCode::kConfig, "scene scale must be positive");
  require(obs.ref_sources.size() == obs.ref_waveforms.size() && !obs.ref_sources.empty(),
          ErrorCode::kShape, "reference positions and waveforms must pair up");
  const double inv = 1.0 / obs.scene_scale;
  ModelInput in;
  in.source = (obs.source - obs.receiver) * inv;
  in.receiver = Vec3::Zero();
  for (const auto& r : obs.ref_sources) in.ref_sources.push_back((r - obs.receiver) * inv);

  Grid3 coords = downsample(*obs.coords, cfg.map_height, cfg.map_width);
  for (double& v : coords.data) v *= inv;
  ReflectionMaps maps = build_reflection_maps(coords, Vec3::Zero(), in.source, in.ref_sources);
  in.source_map = std::move(maps.source_map);
  in.receiver_map = std::move(maps.receiver_map);
  in.ref_maps = std::move(maps.reference_maps);

  const double d_target = (obs.source - obs.receiver).norm();
  for (std::size_t k = 0; k < obs.ref_sources.size(); ++k) {
    const double d_ref = (obs.ref_sources[k] - obs.receiver).norm();
    const auto aligned = time_shift_align(obs.ref_waveforms[k], d_target, d_ref);
    in.ref_specs.push_back(stft_logmag(aligned).values);
    require(in.ref_specs.back().rows() == cfg.bins && in.ref_specs.back().cols() == cfg.frames,
            ErrorCode::kShape, "reference spectrogram does not match the model's grid");
  }
  return in;
}

// ---------------------------------------------------------------------------
// ParamStore

template <class T>
Var<T>& ParamStore<T>::add(const std::string& name, Shape shape, std::vector<T> values) {
  require(!contains(name), ErrorCode::kConfig, "duplicate parameter " + name);
  index_[name] = entries_.size();
  entries_.emplace_back(name, Var<T>::parameter(std::move(shape), std::move(values)));
  return entries_.back().second;
}

template <class T>
const Var<T>& ParamStore<T>::get(const std::string& name) const {
  auto it = index_.find(name);
  require(it != index_.end(), ErrorCode::kConfig, "unknown parameter " + name);
  return entries_[it->second].second;
}

template <class T>
Var<T>& ParamStore<T>::get(const std::string& name) {
  return const_cast<Var<T>&>(std::as_const(*this).get(name));
}

template <class T>
std::size_t ParamStore<T>::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.second.size();
  return n;
}

template <class T>
void ParamStore<T>::zero_grad() {
  for (auto& e : entries_) e.second.zero_grad();
}

// ---------------------------------------------------------------------------
// Conversions

template <class T>
Var<T> to_var(const Eigen::MatrixXd& m) {
  std::vector<T> v(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = static_cast<T>(m(i, j));
  }
  return Var<T>::constant({static_cast<int>(m.rows()), static_cast<int>(m.cols())}, std::move(v));
}

template <class T>
Eigen::MatrixXd to_matrix(const Var<T>& v) {
  const int rows = v.rank() == 1 ? 1 : v.dim(0);
  const int cols = static_cast<int>(v.size()) / std::max(rows, 1);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = static_cast<double>(v.value()[i * cols + j]);
  }
  return m;
}

namespace {

template <class T>
std::vector<T> normal_values(Rng& rng, std::size_t n, double stddev) {
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(stddev * rng.normal());
  return v;
}

template <class T>
Var<T> row_constant(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  return Var<T>::constant({1, n}, std::vector<T>(values.begin(), values.end()));
}

template <class T>
Var<T> zeros_row(int n) {
  return Var<T>::zeros({1, n});
}

}  // namespace

// ---------------------------------------------------------------------------
// XRir

template <class T>
void XRir<T>::add_linear(const std::string& name, int in, int out, double scale, Rng& rng) {
  params_.add(name + ".w", {in, out},
              normal_values<T>(rng, static_cast<std::size_t>(in) * out, scale / std::sqrt(in)));
  params_.add(name + ".b", {out}, std::vector<T>(out, T(0)));
}

template <class T>
void XRir<T>::add_conv(const std::string& name, int in, int out, int kernel, Rng& rng) {
  const int fan_in = in * kernel * kernel;
  params_.add(name + ".w", {out, in, kernel, kernel},
              normal_values<T>(rng, static_cast<std::size_t>(out) * fan_in, 1.0 / std::sqrt(fan_in)));
  params_.add(name + ".b", {out}, std::vector<T>(out, T(0)));
}

template <class T>
XRir<T>::XRir(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  validate(cfg_);
  Rng rng(SeedHasher(seed).add(std::string_view("xrir-init")).value());
  const int c = cfg_.fused_dim();
  const int cp = cfg_.patch_dim;

  add_linear("direct.0", 6 * 2 * cfg_.pe_freqs_coord, cfg_.direct_dim, 1.0, rng);
  add_linear("direct.1", cfg_.direct_dim, cfg_.direct_dim, 1.0, rng);

  add_linear("patch.embed", cfg_.patch_size(), cp, 1.0, rng);
  params_.add("patch.pos", {cfg_.patch_count(), cp},
              normal_values<T>(rng, static_cast<std::size_t>(cfg_.patch_count()) * cp, 0.02));
  for (int l = 0; l < cfg_.layers; ++l) {
    const std::string p = "vit." + std::to_string(l);
    params_.add(p + ".ln1.g", {cp}, std::vector<T>(cp, T(1)));
    params_.add(p + ".ln1.b", {cp}, std::vector<T>(cp, T(0)));
    add_linear(p + ".qkv", cp, 3 * cp, 1.0, rng);
    add_linear(p + ".proj", cp, cp, 1.0, rng);
    params_.add(p + ".ln2.g", {cp}, std::vector<T>(cp, T(1)));
    params_.add(p + ".ln2.b", {cp}, std::vector<T>(cp, T(0)));
    add_linear(p + ".ffn.0", cp, cfg_.ffn_mult * cp, 1.0, rng);
    add_linear(p + ".ffn.1", cfg_.ffn_mult * cp, cp, 1.0, rng);
  }
  params_.add("vit.ln.g", {cp}, std::vector<T>(cp, T(1)));
  params_.add("vit.ln.b", {cp}, std::vector<T>(cp, T(0)));
  params_.add("patch.reduce.w", {1, cfg_.patch_count()},
              normal_values<T>(rng, cfg_.patch_count(), 1.0 / std::sqrt(cfg_.patch_count())));
  params_.add("patch.reduce.b", {cp}, std::vector<T>(cp, T(0)));

  const auto& w = cfg_.encoder_widths;
  add_conv("enc.stem", 1, w[0], 3, rng);
  for (int s = 0; s < 4; ++s) {
    const std::string p = "enc." + std::to_string(s);
    const int in = s == 0 ? w[0] : w[s - 1];
    add_conv(p + ".a", in, w[s], 3, rng);
    add_conv(p + ".b", w[s], w[s], 3, rng);
    add_conv(p + ".skip", in, w[s], 1, rng);
  }

  add_linear("fuse.0", cfg_.target_concat_dim(), c, 1.0, rng);
  add_linear("fuse.1", c, c, 1.0, rng);

  add_linear("time.0", 2 * cfg_.pe_freqs_time, cfg_.time_hidden, 1.0, rng);
  add_linear("time.1", cfg_.time_hidden, c, cfg_.time_basis_init_scale / std::sqrt(c), rng);

  std::vector<T> enc;
  enc.reserve(static_cast<std::size_t>(cfg_.frames) * 2 * cfg_.pe_freqs_time);
  for (int t = 0; t < cfg_.frames; ++t) {
    const double x = static_cast<double>(t) / (cfg_.frames - 1);
    for (double v : posenc(std::span<const double>(&x, 1), cfg_.pe_freqs_time)) enc.push_back(T(v));
  }
  time_encoding_ = Var<T>::constant({cfg_.frames, 2 * cfg_.pe_freqs_time}, std::move(enc));
}

template <class T>
Var<T> XRir<T>::linear(const std::string& name, const Var<T>& x) const {
  return ad::add_rowvec(ad::matmul(x, params_.get(name + ".w")), params_.get(name + ".b"));
}

template <class T>
Var<T> XRir<T>::mlp2(const std::string& name, const Var<T>& x) const {
  return linear(name + ".1", ad::gelu(linear(name + ".0", x)));
}

template <class T>
Var<T> XRir<T>::conv(const std::string& name, const Var<T>& x, int stride, int pad) const {
  return ad::conv2d(x, params_.get(name + ".w"), params_.get(name + ".b"), stride, pad);
}

template <class T>
Var<T> XRir<T>::direct_path_feature(const Vec3& source, const Vec3& receiver) const {
  const double pair[6] = {source.x(), source.y(), source.z(), receiver.x(), receiver.y(), receiver.z()};
  return mlp2("direct", row_constant<T>(posenc(pair, cfg_.pe_freqs_coord)));
}

template <class T>
Var<T> XRir<T>::transformer_block(int layer, const Var<T>& x) const {
  const std::string p = "vit." + std::to_string(layer);
  const int cp = cfg_.patch_dim;
  const int hd = cp / cfg_.heads;
  const T inv_sqrt = T(1.0 / std::sqrt(static_cast<double>(hd)));

  const Var<T> h = ad::layer_norm_rows(x, params_.get(p + ".ln1.g"), params_.get(p + ".ln1.b"));
  const Var<T> qkv = linear(p + ".qkv", h);
  std::vector<Var<T>> heads;
  for (int i = 0; i < cfg_.heads; ++i) {
    const Var<T> q = ad::slice_cols(qkv, i * hd, hd);
    const Var<T> k = ad::slice_cols(qkv, cp + i * hd, hd);
    const Var<T> v = ad::slice_cols(qkv, 2 * cp + i * hd, hd);
    heads.push_back(ad::matmul(ad::softmax_rows(ad::scale(ad::matmul_nt(q, k), inv_sqrt)), v));
  }
  const Var<T> y = ad::add(x, linear(p + ".proj", ad::concat_cols(heads)));
  const Var<T> h2 = ad::layer_norm_rows(y, params_.get(p + ".ln2.g"), params_.get(p + ".ln2.b"));
  return ad::add(y, mlp2(p + ".ffn", h2));
}

template <class T>
Var<T> XRir<T>::reflection_feature(const Grid3& map, Var<T>* tokens) const {
  require(map.height == cfg_.map_height && map.width == cfg_.map_width, ErrorCode::kShape,
          "reflection map is " + std::to_string(map.height) + "x" + std::to_string(map.width) +
              ", model expects " + std::to_string(cfg_.map_height) + "x" +
              std::to_string(cfg_.map_width));
  require(map.data.size() == static_cast<std::size_t>(map.height) * map.width * 3, ErrorCode::kShape,
          "reflection map storage does not match its shape");
  const int ph = cfg_.patch_height, pw = cfg_.patch_width;
  const int np = cfg_.patch_count(), psz = cfg_.patch_size();
  std::vector<T> patches(static_cast<std::size_t>(np) * psz);
  for (int pr = 0; pr < cfg_.patch_rows(); ++pr) {
    for (int pc = 0; pc < cfg_.patch_cols(); ++pc) {
      T* dst = patches.data() + static_cast<std::size_t>(pr * cfg_.patch_cols() + pc) * psz;
      for (int i = 0; i < ph; ++i) {
        for (int j = 0; j < pw; ++j) {
          const auto v = map.at(pr * ph + i, pc * pw + j);
          for (int c = 0; c < 3; ++c) *dst++ = static_cast<T>(v[c]);
        }
      }
    }
  }
  Var<T> x = ad::add(linear("patch.embed", Var<T>::constant({np, psz}, std::move(patches))),
                     params_.get("patch.pos"));
  for (int l = 0; l < cfg_.layers; ++l) x = transformer_block(l, x);
  x = ad::layer_norm_rows(x, params_.get("vit.ln.g"), params_.get("vit.ln.b"));
  if (tokens) *tokens = x;
  return ad::add_rowvec(ad::matmul(params_.get("patch.reduce.w"), x), params_.get("patch.reduce.b"));
}

template <class T>
Var<T> XRir<T>::encode_reference_rir(const Eigen::MatrixXd& log_magnitude) const {
  require(log_magnitude.rows() == cfg_.bins && log_magnitude.cols() == cfg_.frames, ErrorCode::kShape,
          "reference spectrogram must be " + std::to_string(cfg_.bins) + "x" +
              std::to_string(cfg_.frames));
  Var<T> x = ad::reshape(to_var<T>(log_magnitude), {1, cfg_.bins, cfg_.frames});
  x = ad::gelu(conv("enc.stem", x, 2, 1));
  for (int s = 0; s < 4; ++s) {
    const std::string p = "enc." + std::to_string(s);
    const Var<T> y = conv(p + ".b", ad::gelu(conv(p + ".a", x, 2, 1)), 1, 1);
    x = ad::gelu(ad::add(y, conv(p + ".skip", x, 2, 0)));
  }
  return ad::mean_spatial(x);
}

template <class T>
Var<T> XRir<T>::target_projection(const Var<T>& target_concat) const {
  require(static_cast<int>(target_concat.size()) == cfg_.target_concat_dim(), ErrorCode::kShape,
          "target concat has the wrong width");
  return mlp2("fuse", target_concat);
}

template <class T>
Var<T> XRir<T>::time_basis() const {
  return mlp2("time", time_encoding_);
}

template <class T>
Var<T> attend(const Var<T>& h_t, const Var<T>& h_ref, Var<T>* attention) {
  require(h_t.rank() == 2 && h_ref.rank() == 2 && h_t.dim(0) == 1 && h_t.dim(1) == h_ref.dim(1),
          ErrorCode::kShape, "attend: h_t must be [1,C] and h_ref [K,C]");
  const T inv_sqrt = T(1.0 / std::sqrt(static_cast<double>(h_ref.dim(1))));
  const Var<T> scores = ad::scale(ad::matmul_nt(h_ref, h_t), inv_sqrt);  // [K,1]
  const Var<T> a = ad::transpose(ad::softmax_rows(ad::transpose(scores)));
  if (attention) *attention = a;
  return ad::scale_rows(h_ref, a);
}

template <class T>
Var<T> predict_weights(const Var<T>& z, const Var<T>& time_basis) {
  require(z.rank() == 2 && time_basis.rank() == 2 && z.dim(1) == time_basis.dim(1), ErrorCode::kShape,
          "predict_weights: Z and T_b must share C");
  return ad::matmul_nt(z, time_basis);
}

template <class T>
Var<T> compose_prediction(const Var<T>& weights, const std::vector<Eigen::MatrixXd>& refs) {
  require(weights.rank() == 2 && weights.dim(0) == static_cast<int>(refs.size()) && !refs.empty(),
          ErrorCode::kShape, "compose_prediction: one weight row per reference");
  Var<T> out;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    require(refs[k].cols() == weights.dim(1), ErrorCode::kShape,
            "compose_prediction: frame count mismatch");
    require(refs[k].rows() == refs[0].rows(), ErrorCode::kShape,
            "compose_prediction: bin count mismatch");
    const Var<T> term =
        ad::mul_rowvec(to_var<T>(refs[k]), ad::slice_rows(weights, static_cast<int>(k), 1));
    out = k == 0 ? term : ad::add(out, term);
  }
  return out;
}

template <class T>
ForwardTrace<T> XRir<T>::forward(const ModelInput& in) const {
  const int k = in.k();
  require(k >= 1 && static_cast<int>(in.ref_maps.size()) == k &&
              static_cast<int>(in.ref_sources.size()) == k,
          ErrorCode::kShape, "forward: references must carry a map, a position and a spectrogram");
  ForwardTrace<T> tr;
  const int cd = cfg_.direct_dim, cp = cfg_.patch_dim, cr = cfg_.ref_feature_dim;

  tr.g_dir = cfg_.no_direct_path ? zeros_row<T>(cd) : direct_path_feature(in.source, in.receiver);
  if (cfg_.no_reflection_module) {
    tr.g_s_rf = zeros_row<T>(cp);
    tr.g_r_rf = zeros_row<T>(cp);
  } else {
    tr.g_s_rf = reflection_feature(in.source_map);
    tr.g_r_rf = reflection_feature(in.receiver_map, &tr.g_prime_receiver);
  }
  std::vector<Var<T>> rows;
  for (int i = 0; i < k; ++i) {
    tr.g_ref_dir.push_back(cfg_.no_direct_path ? zeros_row<T>(cd)
                                               : direct_path_feature(in.ref_sources[i], in.receiver));
    tr.g_ref_rf.push_back(cfg_.no_reflection_module ? zeros_row<T>(cp)
                                                    : reflection_feature(in.ref_maps[i]));
    tr.f_a.push_back(cfg_.no_reference_rirs ? zeros_row<T>(cr) : encode_reference_rir(in.ref_specs[i]));
    rows.push_back(ad::concat_cols<T>({tr.g_ref_dir[i], tr.g_ref_rf[i], tr.g_r_rf, tr.f_a[i]}));
  }
  tr.h_t = target_projection(ad::concat_cols<T>({tr.g_dir, tr.g_s_rf, tr.g_r_rf}));
  tr.h_ref = ad::concat_rows(rows);
  tr.z = attend(tr.h_t, tr.h_ref, &tr.attention);
  tr.time_basis = time_basis();
  tr.weights = predict_weights(tr.z, tr.time_basis);
  tr.s_pred = compose_prediction(tr.weights, in.ref_specs);
  return tr;
}

template <class T>
Var<T> loss_total(const Var<T>& s_pred, const Eigen::MatrixXd& s_gt, double lambda_ed, LossParts* parts) {
  require(s_pred.rank() == 2 && s_pred.dim(0) == s_gt.rows() && s_pred.dim(1) == s_gt.cols(),
          ErrorCode::kShape, "loss: prediction and target shapes differ");
  for (T v : s_pred.value()) require(!std::isnan(v), ErrorCode::kNumeric, "loss: NaN in prediction");
  require(!s_gt.array().isNaN().any(), ErrorCode::kNumeric, "loss: NaN in target");
  const Var<T> gt = to_var<T>(s_gt);
  const Var<T> l_stft = ad::mean(ad::abs(ad::sub(ad::exp(s_pred), ad::exp(gt))));
  const Var<T> l_ed = ad::mean(ad::abs(ad::sub(ad::edc_db_rows(s_pred), ad::edc_db_rows(gt))));
  Var<T> total = ad::add(l_stft, ad::scale(l_ed, static_cast<T>(lambda_ed)));
  if (parts) {
    parts->stft = l_stft.item();
    parts->edc = l_ed.item();
    parts->total = total.item();
  }
  return total;
}

template <class T>
LossParts gradients(XRir<T>& model, std::span<const TrainingExample> batch) {
  require(!batch.empty(), ErrorCode::kEmptyDataset, "gradients of an empty batch");
  model.params().zero_grad();
  LossParts mean_parts;
  const T inv = T(1) / static_cast<T>(batch.size());
  for (const auto& ex : batch) {
    const auto tr = model.forward(ex.input);
    LossParts p;
    const Var<T> loss = loss_total(tr.s_pred, ex.target, model.config().lambda_ed, &p);
    require(std::isfinite(p.total), ErrorCode::kNumeric, "non-finite loss");
    ad::backward(ad::scale(loss, inv));
    mean_parts.stft += p.stft / batch.size();
    mean_parts.edc += p.edc / batch.size();
    mean_parts.total += p.total / batch.size();
  }
  for (std::size_t i = 0; i < model.params().size(); ++i) {
    for (T g : model.params().at(i).grad()) {
      require(std::isfinite(g), ErrorCode::kNumeric,
              "non-finite gradient in " + model.params().name(i));
    }
  }
  return mean_parts;
}

#define ROOMECHO_MODEL_INSTANTIATE(T)                                                            \
  template class ParamStore<T>;                                                                  \
  template class XRir<T>;                                                                        \
  template Var<T> to_var<T>(const Eigen::MatrixXd&);                                             \
  template Eigen::MatrixXd to_matrix<T>(const Var<T>&);                                          \
  template Var<T> attend<T>(const Var<T>&, const Var<T>&, Var<T>*);                              \
  template Var<T> predict_weights<T>(const Var<T>&, const Var<T>&);                              \
  template Var<T> compose_prediction<T>(const Var<T>&, const std::vector<Eigen::MatrixXd>&);     \
  template Var<T> loss_total<T>(const Var<T>&, const Eigen::MatrixXd&, double, LossParts*);      \
  template LossParts gradients<T>(XRir<T>&, std::span<const TrainingExample>);

ROOMECHO_MODEL_INSTANTIATE(float)
ROOMECHO_MODEL_INSTANTIATE(double)

#undef ROOMECHO_MODEL_INSTANTIATE

}  // namespace roomecho
