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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "model_fixtures.hpp"
#include "roomecho/error.hpp"
#include "roomecho/model.hpp"
#include "roomecho/optim.hpp"

namespace roomecho {
namespace {

using ad::Var;
using testing::random_input;
using testing::random_target;

std::vector<double> row(const Var<double>& v, int r, int cols) {
  return {v.value().begin() + r * cols, v.value().begin() + (r + 1) * cols};
}

TEST(Posenc, Examples) {
  const double zero = 0.0, half = 0.5;
  EXPECT_EQ(posenc({&zero, 1}, 2), (std::vector<double>{0, 1, 0, 1}));
  const auto p = posenc({&half, 1}, 1);
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  EXPECT_NEAR(p[1], 0.0, 1e-15);
  const std::vector<double> six(6, 0.3);
  EXPECT_EQ(posenc(six, 20).size(), 240u);
  // Component-major: the second component's terms follow all of the first's.
  const std::vector<double> two{0.25, 0.0};
  const auto q = posenc(two, 2);
  EXPECT_NEAR(q[2], std::sin(2 * std::numbers::pi * 0.25), 1e-15);
  EXPECT_EQ(q[4], 0.0);
  EXPECT_EQ(q[5], 1.0);
}

TEST(Config, DerivedDims) {
  const ModelConfig c = ModelConfig::full();
  EXPECT_EQ(c.fused_dim(), 1792);
  EXPECT_EQ(c.target_concat_dim(), 1280);
  EXPECT_EQ(c.patch_count(), 256);
  EXPECT_NO_THROW(validate(c));
  EXPECT_NO_THROW(validate(ModelConfig::tiny()));
  EXPECT_NO_THROW(validate(ModelConfig::compact()));
  ModelConfig bad = c;
  bad.heads = 7;
  EXPECT_THROW(validate(bad), Error);
  bad = c;
  bad.map_width = 500;
  EXPECT_THROW(validate(bad), Error);
}

class TinyModel : public ::testing::Test {
 protected:
  ModelConfig cfg = ModelConfig::tiny();
  XRir<double> model{cfg, 3};
};

TEST_F(TinyModel, DirectPathFeature) {
  const Var<double> a = model.direct_path_feature(Vec3(.1, .2, .3), Vec3::Zero());
  EXPECT_EQ(a.shape(), (ad::Shape{1, cfg.direct_dim}));
  EXPECT_EQ(a.value(), model.direct_path_feature(Vec3(.1, .2, .3), Vec3::Zero()).value());
  Rng rng(4);
  std::vector<std::vector<double>> seen;
  for (int i = 0; i < 100; ++i) {
    const Vec3 s(rng.uniform(-.5, .5), rng.uniform(-.5, .5), rng.uniform(-.5, .5));
    const auto v = model.direct_path_feature(s, Vec3::Zero()).value();
    for (const auto& o : seen) EXPECT_NE(o, v);
    seen.push_back(v);
  }
}

TEST_F(TinyModel, ReflectionFeature) {
  Rng rng(5);
  const Grid3 map = testing::random_grid(cfg.map_height, cfg.map_width, rng);
  Var<double> tokens;
  const Var<double> g = model.reflection_feature(map, &tokens);
  EXPECT_EQ(tokens.shape(), (ad::Shape{cfg.patch_count(), cfg.patch_dim}));
  EXPECT_EQ(g.shape(), (ad::Shape{1, cfg.patch_dim}));
  // Swap the first two patches.
  Grid3 swapped = map;
  for (int i = 0; i < cfg.patch_height; ++i) {
    for (int j = 0; j < cfg.patch_width; ++j) {
      const Vec3 a = map.at(i, j), b = map.at(i, j + cfg.patch_width);
      swapped.at(i, j) = b;
      swapped.at(i, j + cfg.patch_width) = a;
    }
  }
  EXPECT_NE(model.reflection_feature(swapped).value(), g.value());
  EXPECT_THROW(model.reflection_feature(Grid3(4, 4)), Error);
}

TEST_F(TinyModel, ReferenceEncoder) {
  const Var<double> a = model.encode_reference_rir(Eigen::MatrixXd::Constant(63, 310, -2.0));
  const Var<double> b = model.encode_reference_rir(Eigen::MatrixXd::Constant(63, 310, -5.0));
  EXPECT_EQ(a.shape(), (ad::Shape{1, cfg.ref_feature_dim}));
  EXPECT_NE(a.value(), b.value());
  EXPECT_THROW(model.encode_reference_rir(Eigen::MatrixXd::Zero(63, 300)), Error);
}

TEST_F(TinyModel, ForwardContracts) {
  const ModelInput in = random_input(cfg, 2, 11);
  const auto tr = model.forward(in);
  const int c = cfg.fused_dim();
  EXPECT_EQ(tr.h_t.shape(), (ad::Shape{1, c}));
  EXPECT_EQ(tr.h_ref.shape(), (ad::Shape{2, c}));
  EXPECT_EQ(tr.z.shape(), (ad::Shape{2, c}));
  EXPECT_EQ(tr.time_basis.shape(), (ad::Shape{cfg.frames, c}));
  EXPECT_EQ(tr.weights.shape(), (ad::Shape{2, cfg.frames}));
  EXPECT_EQ(tr.s_pred.shape(), (ad::Shape{63, 310}));
  // h_ref rows are the raw concatenation.
  for (int k = 0; k < 2; ++k) {
    std::vector<double> want = tr.g_ref_dir[k].value();
    for (const auto* part : {&tr.g_ref_rf[k], &tr.g_r_rf, &tr.f_a[k]}) {
      want.insert(want.end(), part->value().begin(), part->value().end());
    }
    EXPECT_EQ(row(tr.h_ref, k, c), want);
    // Each reference is encoded independently of the others.
    EXPECT_EQ(tr.f_a[k].value(), model.encode_reference_rir(in.ref_specs[k]).value());
  }
  double total = 0;
  for (double a : tr.attention.value()) total += a;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST_F(TinyModel, TimeBasisRowsDiffer) {
  const Var<double> tb = model.time_basis();
  EXPECT_EQ(tb.value(), model.time_basis().value());
  const int c = cfg.fused_dim();
  EXPECT_NE(row(tb, 0, c), row(tb, cfg.frames - 1, c));
}

TEST_F(TinyModel, ReferencePermutationInvariance) {
  const ModelInput in = random_input(cfg, 2, 12);
  ModelInput sw = in;
  std::swap(sw.ref_sources[0], sw.ref_sources[1]);
  std::swap(sw.ref_maps[0], sw.ref_maps[1]);
  std::swap(sw.ref_specs[0], sw.ref_specs[1]);
  const auto a = model.forward(in).s_pred.value();
  const auto b = model.forward(sw).s_pred.value();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST_F(TinyModel, FiniteAcrossSeeds) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    XRir<float> m(cfg, seed);
    const auto s = m.forward(random_input(cfg, 2, 100 + seed)).s_pred.value();
    for (float v : s) ASSERT_TRUE(std::isfinite(v));
  }
}

TEST(Ablation, ZeroedSlots) {
  ModelConfig cfg = ModelConfig::tiny();
  cfg.no_direct_path = true;
  const XRir<double> m(cfg, 1);
  const auto tr = m.forward(random_input(cfg, 2, 3));
  const int c = cfg.fused_dim();
  for (int k = 0; k < 2; ++k) {
    const auto r = row(tr.h_ref, k, c);
    for (int i = 0; i < cfg.direct_dim; ++i) EXPECT_EQ(r[i], 0.0);
  }
  for (double v : tr.g_dir.value()) EXPECT_EQ(v, 0.0);

  cfg = ModelConfig::tiny();
  cfg.no_reference_rirs = true;
  const XRir<double> m2(cfg, 1);
  const auto tr2 = m2.forward(random_input(cfg, 2, 3));
  for (const auto& f : tr2.f_a) {
    for (double v : f.value()) EXPECT_EQ(v, 0.0);
  }
  // Same parameter layout under every ablation.
  EXPECT_EQ(m.parameter_count(), XRir<double>(ModelConfig::tiny(), 1).parameter_count());
}

TEST(Attend, Contracts) {
  Rng rng(1);
  std::vector<double> ht(6), hr(6);
  for (double& v : ht) v = rng.normal();
  for (double& v : hr) v = rng.normal();
  Var<double> a;
  const auto z1 = attend(Var<double>::constant({1, 6}, ht), Var<double>::constant({1, 6}, hr), &a);
  EXPECT_EQ(a.value(), (std::vector<double>{1.0}));
  EXPECT_EQ(z1.value(), hr);

  std::vector<double> same(hr);
  same.insert(same.end(), hr.begin(), hr.end());
  same.insert(same.end(), hr.begin(), hr.end());
  attend(Var<double>::constant({1, 6}, ht), Var<double>::constant({3, 6}, same), &a);
  for (double w : a.value()) EXPECT_NEAR(w, 1.0 / 3, 1e-15);

  std::vector<double> three(18);
  for (double& v : three) v = rng.normal();
  attend(Var<double>::constant({1, 6}, ht), Var<double>::constant({3, 6}, three), &a);
  const auto base = a.value();
  EXPECT_NEAR(base[0] + base[1] + base[2], 1.0, 1e-12);
  // Adding u to every h_ref row adds the same u.h_t / sqrt(C) to each score.
  std::vector<double> shifted(three);
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 6; ++j) shifted[k * 6 + j] += 0.7 * ht[j];
  }
  Var<double> a2;
  attend(Var<double>::constant({1, 6}, ht), Var<double>::constant({3, 6}, shifted), &a2);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(a2.value()[k], base[k], 1e-12);
}

TEST(PredictWeights, Examples) {
  EXPECT_EQ(predict_weights(Var<double>::constant({1, 1}, {2}), Var<double>::constant({2, 1}, {3, 5})).value(),
            (std::vector<double>{6, 10}));
  const auto w = predict_weights(Var<double>::zeros({2, 3}), Var<double>::constant({4, 3}, std::vector<double>(12, 1)));
  for (double v : w.value()) EXPECT_EQ(v, 0.0);
  const auto z = Var<double>::constant({1, 2}, {1, -2});
  const auto tb = Var<double>::constant({2, 2}, {1, 2, 3, 4});
  const auto w1 = predict_weights(z, tb).value();
  const auto w3 = predict_weights(ad::scale(z, 3.0), tb).value();
  for (int i = 0; i < 2; ++i) EXPECT_DOUBLE_EQ(w3[i], 3 * w1[i]);
}

TEST(Compose, Examples) {
  Rng rng(2);
  Eigen::MatrixXd r1 = Eigen::MatrixXd::Random(63, 310), r2 = Eigen::MatrixXd::Random(63, 310);
  const auto same = to_matrix(compose_prediction(Var<double>::constant({1, 310}, std::vector<double>(310, 1.0)), {r1}));
  EXPECT_EQ(same, r1);
  const auto zero = to_matrix(compose_prediction(Var<double>::zeros({2, 310}), {r1, r2}));
  EXPECT_TRUE((zero.array() == 0.0).all());
  std::vector<double> w(620);
  for (double& v : w) v = rng.normal();
  const auto wv = Var<double>::constant({2, 310}, w);
  const Eigen::MatrixXd sum = to_matrix(compose_prediction(wv, {r1, r2}));
  const Eigen::MatrixXd a = to_matrix(compose_prediction(wv, {r1, Eigen::MatrixXd::Zero(63, 310)}));
  const Eigen::MatrixXd b = to_matrix(compose_prediction(wv, {Eigen::MatrixXd::Zero(63, 310), r2}));
  EXPECT_LT((sum - a - b).cwiseAbs().maxCoeff(), 1e-12);
  // Per-frame weight broadcast over bins.
  for (int t = 0; t < 310; t += 37) {
    for (int f = 0; f < 63; f += 11) EXPECT_NEAR(sum(f, t), w[t] * r1(f, t) + w[310 + t] * r2(f, t), 1e-12);
  }
}

TEST(Loss, Examples) {
  const Eigen::MatrixXd gt = random_target(ModelConfig::tiny(), 4);
  LossParts p;
  EXPECT_EQ(loss_total(to_var<double>(gt), gt, 0.01, &p).item(), 0.0);
  const Eigen::MatrixXd up = (gt.array() + std::log(2.0)).matrix();
  loss_total(to_var<double>(up), gt, 0.01, &p);
  EXPECT_NEAR(p.stft, gt.array().exp().mean(), 1e-12);
  EXPECT_NEAR(p.edc, 0.0, 1e-9);
  Eigen::MatrixXd nan = gt;
  nan(3, 3) = std::nan("");
  EXPECT_THROW(loss_total(to_var<double>(nan), gt, 0.01), Error);
  Rng rng(3);
  for (int i = 0; i < 5; ++i) {
    const Eigen::MatrixXd other = random_target(ModelConfig::tiny(), 10 + i);
    EXPECT_GE(loss_total(to_var<double>(other), gt, 0.01).item(), 0.0);
  }
}

TEST(Gradients, MatchFiniteDifferences) {
  const ModelConfig cfg = ModelConfig::tiny();
  XRir<double> model(cfg, 7);
  std::vector<TrainingExample> batch{{random_input(cfg, 2, 21), random_target(cfg, 22)}};
  auto loss = [&] { return loss_total(model.forward(batch[0].input).s_pred, batch[0].target, cfg.lambda_ed).item(); };
  auto analytic = [&] { gradients(model, std::span<const TrainingExample>(batch)); };
  const auto r = testing::check_gradients(model.params(), loss, analytic, 60, 5);
  EXPECT_EQ(r.checked, 60);
  EXPECT_LT(r.max_rel_error, 1e-3);
  // Gradient shapes equal parameter shapes.
  for (std::size_t i = 0; i < model.params().size(); ++i) {
    EXPECT_EQ(model.params().at(i).grad().size(), model.params().at(i).size());
  }
}

TEST(Gradients, OneStepDecreasesLoss) {
  const ModelConfig cfg = ModelConfig::tiny();
  int decreased = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    XRir<double> model(cfg, seed);
    std::vector<TrainingExample> batch{{random_input(cfg, 2, 1000 + seed), random_target(cfg, 2000 + seed)}};
    const double before = gradients(model, std::span<const TrainingExample>(batch)).total;
    // Plain gradient step with a small rate.
    for (std::size_t p = 0; p < model.params().size(); ++p) {
      auto& v = model.params().at(p).mutable_value();
      const auto& g = model.params().at(p).grad();
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= 1e-3 * g[i];
    }
    const double after =
        loss_total(model.forward(batch[0].input).s_pred, batch[0].target, cfg.lambda_ed).item();
    decreased += after < before;
  }
  EXPECT_GE(decreased, 95);
}

TEST(Adam, MatchesHandComputedStep) {
  ParamStore<double> store;
  store.add("w", {2}, {1.0, -2.0});
  store.get("w").mutable_grad() = {0.5, -0.1};
  AdamConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.clip_norm = 0.0;
  Adam<double> opt(store, cfg);
  opt.step();
  // First step of bias-corrected Adam moves each weight by lr * sign(g).
  EXPECT_NEAR(store.get("w").value()[0], 1.0 - 0.1, 1e-6);
  EXPECT_NEAR(store.get("w").value()[1], -2.0 + 0.1, 1e-6);
}

TEST(Adam, ClipsGlobalNorm) {
  ParamStore<double> store;
  store.add("w", {2}, {0.0, 0.0});
  store.get("w").mutable_grad() = {30.0, 40.0};
  AdamConfig cfg;
  cfg.clip_norm = 1.0;
  Adam<double> opt(store, cfg);
  EXPECT_NEAR(opt.step(), 50.0, 1e-12);
  // Clipping rescales both moments identically, leaving the ratio intact.
  EXPECT_NEAR(opt.first_moments()[0][0] / opt.first_moments()[0][1], 0.75, 1e-12);
  EXPECT_NEAR(opt.first_moments()[0][0], 0.1 * 0.6, 1e-12);
}

}  // namespace
}  // namespace roomecho
