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
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <unistd.h>

#include "roomecho/acoustic_map.hpp"
#include "roomecho/checkpoint.hpp"
#include "roomecho/cli.hpp"
#include "roomecho/dataset.hpp"
#include "roomecho/dsp.hpp"
#include "roomecho/error.hpp"
#include "roomecho/evaluate.hpp"
#include "roomecho/io.hpp"
#include "roomecho/materials.hpp"
#include "roomecho/parallel.hpp"
#include "roomecho/split.hpp"
#include "roomecho/train.hpp"

namespace roomecho {
namespace {

namespace fs = std::filesystem;

fs::path scratch_root() {
  return fs::temp_directory_path() / ("roomecho-unit-" + std::to_string(::getpid()));
}

class ScratchCleanup : public ::testing::Environment {
 public:
  void TearDown() override { fs::remove_all(scratch_root()); }
};
const auto* const kCleanup = ::testing::AddGlobalTestEnvironment(new ScratchCleanup);

fs::path scratch(const std::string& name) {
  const fs::path p = scratch_root() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

GenConfig small_gen(std::uint64_t seed) {
  GenConfig g;
  g.seed = seed;
  g.rooms_per_category = 2;
  g.sources_per_room = 8;
  g.receivers_per_room = 4;
  g.panorama_height = 64;
  g.panorama_width = 128;
  return g;
}

// One small dataset shared by the read-only tests below.
class SmallData : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new fs::path(scratch("shared"));
    generate_dataset(small_gen(3), *root_);
    data_ = new Dataset(Dataset::load(*root_));
  }
  static void TearDownTestSuite() {
    delete data_;
    fs::remove_all(*root_);
    delete root_;
  }
  static fs::path* root_;
  static Dataset* data_;
};
fs::path* SmallData::root_ = nullptr;
Dataset* SmallData::data_ = nullptr;

ModelConfig small_model() {
  ModelConfig c = ModelConfig::tiny();
  c.k = 2;
  return c;
}

TEST_F(SmallData, ManifestCounts) {
  const auto& m = data_->manifest();
  EXPECT_EQ(m.rooms.size(), 6u);
  EXPECT_EQ(m.rirs.size(), 6u * 8 * 4);
  std::set<std::tuple<std::string, int, int>> seen;
  for (const auto& e : m.rirs) EXPECT_TRUE(seen.insert({e.room_id, e.receiver, e.source}).second);
  for (std::size_t r = 0; r < data_->room_count(); ++r) {
    const auto& p = data_->placement(r);
    EXPECT_FALSE(check_placement(data_->room(r), p, m.gen.placement).has_value());
    EXPECT_EQ(p.reference_source_indices.size(), 4u);
    for (int i = 0; i < 4; ++i) {
      for (int s = 0; s < 8; ++s) {
        const auto rec = data_->record(r, i, s);
        ASSERT_EQ(rec.waveform.size(), 9600u);
        for (double v : rec.waveform) ASSERT_TRUE(std::isfinite(v));
        const double d = (rec.source - rec.receiver).norm();
        const auto first =
            std::find_if(rec.waveform.begin(), rec.waveform.end(), [](double v) { return v != 0.0; });
        EXPECT_GE(first - rec.waveform.begin(), std::lround(d / 343.0 * 22050.0) - 1);
      }
    }
  }
}

TEST_F(SmallData, StoredWaveformMatchesSimulation) {
  const auto& sim = data_->sim();
  for (std::size_t r = 0; r < data_->room_count(); r += 2) {
    SimConfig cfg = sim;
    const auto& p = data_->placement(r);
    const auto rirs = data_->waveform(r, 1, 3);
    // Seeds are per room; re-simulate with what the manifest recorded.
    const auto again = simulate_rir(data_->room(r), p.sources[3], p.receivers[1], cfg).waveform;
    ASSERT_EQ(rirs.size(), again.size());
    for (std::size_t i = 0; i < again.size(); ++i) EXPECT_FLOAT_EQ(float(rirs[i]), float(again[i]));
  }
}

TEST_F(SmallData, PanoramaSidecar) {
  const auto pano = data_->panorama(0, 0);
  EXPECT_EQ(pano.height, 64);
  EXPECT_EQ(pano.width, 128);
  EXPECT_EQ(pano.receiver, data_->placement(0).receivers[0]);
  const CoordMap c = data_->coords(0, 0);
  EXPECT_NEAR(c.at(5, 7).norm(), pano.at(5, 7), 1e-5);
}

TEST(Generate, Deterministic) {
  const fs::path a = scratch("det-a"), b = scratch("det-b");
  generate_dataset(small_gen(11), a);
  generate_dataset(small_gen(11), b);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), a);
    EXPECT_EQ(slurp(e.path()), slurp(b / rel)) << rel;
    ++files;
  }
  EXPECT_GT(files, 6u);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Generate, DeskScaleCount) {
  const fs::path a = scratch("desk");
  GenConfig g;
  g.seed = 7;
  g.panorama_height = 32;
  g.panorama_width = 64;
  const auto m = generate_dataset(g, a);
  EXPECT_EQ(m.rooms.size(), 15u);
  EXPECT_EQ(m.rirs.size(), 720u);
  fs::remove_all(a);
}

TEST(Generate, MaterialsChangeDecay) {
  // Same geometry, materials drawn from two seeds.
  const auto& lib = default_material_library();
  RoomSpec a = sample_room_spec(default_room_categories()[1], "office_x", 0.0, 5);
  RoomSpec b = a;
  Rng r1(1), r2(2);
  for (auto& m : a.materials) m = lib.sample(r1).id;
  for (auto& m : b.materials) m = lib.sample(r2).id;
  const Room ra = a.build(), rb = b.build();
  ASSERT_NE(sabine_t60(ra), sabine_t60(rb));
  const Placement p = sample_placements(ra, 4, 3, 9);
  auto mean_t60 = [&](const Room& room) {
    double acc = 0;
    int n = 0;
    for (const auto& s : p.sources) {
      for (const auto& m : p.receivers) {
        const T60 t = metric_t60(simulate_rir(room, s, m).waveform);
        if (t.valid) {
          acc += t.seconds;
          ++n;
        }
      }
    }
    return acc / n;
  };
  const double ta = mean_t60(ra), tb = mean_t60(rb);
  // Differences well beyond the 5% estimation noise of the T20 fit.
  EXPECT_GT(std::abs(ta - tb), 0.1 * std::min(ta, tb));
  EXPECT_EQ(ta < tb, sabine_t60(ra) < sabine_t60(rb));
}

TEST(Generate, ConfigRoundTrip) {
  const GenConfig g = small_gen(4);
  const GenConfig back = gen_config_from_json(to_json(g));
  EXPECT_EQ(to_json(back).dump(), to_json(g).dump());
  EXPECT_THROW(gen_config_from_json(nlohmann::json{{"bogus", 1}}), Error);
}

TEST(Split, SeenTenReceivers) {
  DatasetManifest m;
  m.rooms.push_back({"r0", "office", "shoebox", "", "", "", {}, 0.5});
  for (int r = 0; r < 10; ++r) m.rirs.push_back({"r0", r, 0, 0});
  const SplitSpec s = make_split(m, SplitMode::kSeen, 1);
  EXPECT_EQ(s.train.size(), 9u);
  EXPECT_EQ(s.test.size(), 1u);
  DatasetManifest one;
  one.rooms.push_back({"r0", "office", "shoebox", "", "", "", {}, 0.5});
  one.rirs.push_back({"r0", 0, 0, 0});
  try {
    make_split(one, SplitMode::kSeen, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSplitInfeasible);
  }
}

TEST_F(SmallData, SplitInvariants) {
  for (SplitMode mode : {SplitMode::kSeen, SplitMode::kUnseen}) {
    const SplitSpec s = make_split(data_->manifest(), mode, 5);
    std::set<ReceiverKey> train(s.train.begin(), s.train.end());
    for (const auto& k : s.test) EXPECT_FALSE(train.count(k));
    EXPECT_EQ(s.train.size() + s.test.size(), 6u * 4);
    EXPECT_EQ(to_json(make_split(data_->manifest(), mode, 5)).dump(), to_json(s).dump());
    const SplitSpec back = split_from_json(to_json(s));
    EXPECT_EQ(back.train, s.train);
    if (mode == SplitMode::kUnseen) {
      std::set<std::string> train_rooms, test_rooms;
      for (const auto& k : s.train) train_rooms.insert(k.first);
      for (const auto& k : s.test) test_rooms.insert(k.first);
      for (const auto& r : test_rooms) EXPECT_FALSE(train_rooms.count(r));
      EXPECT_EQ(test_rooms.size(), 3u);  // one per category
    }
  }
}

TEST_F(SmallData, ExamplesSkipCandidates) {
  const SplitSpec s = make_split(data_->manifest(), SplitMode::kUnseen, 5);
  const auto ex = split_examples(*data_, s.test);
  EXPECT_EQ(ex.size(), s.test.size() * 4);  // 8 sources minus 4 candidates
  for (const auto& e : ex) {
    const auto& c = data_->placement(e.room).reference_source_indices;
    EXPECT_EQ(std::find(c.begin(), c.end(), e.source), c.end());
  }
}

TEST_F(SmallData, ReferencesBeyondPoolRejected) {
  Rng rng(1);
  try {
    choose_references(data_->placement(0), 5, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
}

TEST_F(SmallData, TrainingReducesLoss) {
  const SplitSpec s = make_split(data_->manifest(), SplitMode::kUnseen, 5);
  TrainConfig t;
  t.steps = 200;
  t.batch_size = 2;
  t.adam.learning_rate = 1e-3;
  t.seed = 2;
  Trainer tr(*data_, s, small_model(), t);
  tr.run();
  const auto& l = tr.state().losses;
  ASSERT_EQ(l.size(), 200u);
  auto window = [&](std::size_t a) {
    double acc = 0;
    for (std::size_t i = a; i < a + 20; ++i) acc += l[i];
    return acc / 20;
  };
  EXPECT_LT(window(180), window(0));
}

TEST_F(SmallData, ResumeReproducesLosses) {
  const SplitSpec s = make_split(data_->manifest(), SplitMode::kUnseen, 5);
  TrainConfig t;
  t.steps = 6;
  t.batch_size = 2;
  t.seed = 3;
  t.checkpoint_every = 3;
  const fs::path out = scratch("resume");
  Trainer full(*data_, s, small_model(), t);
  full.run(out);
  Trainer again(*data_, s, small_model(), t);
  again.resume(load_checkpoint(out / "step-3"));
  again.run();
  ASSERT_EQ(again.state().losses.size(), 6u);
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(again.state().losses[i], full.state().losses[i], 1e-5 * std::abs(full.state().losses[i]));
  }
  EXPECT_TRUE(fs::exists(out / "final" / "checkpoint.json"));
  EXPECT_EQ(slurp(out / "loss.csv").substr(0, 39), "step,loss,stft_loss,edc_loss,grad_norm\n");
  fs::remove_all(out);
}

TEST(Checkpoint, BitExactRoundTrip) {
  const fs::path out = scratch("ckpt");
  XRir<float> m(ModelConfig::tiny(), 8);
  Adam<float> opt(m.params(), {});
  for (std::size_t i = 0; i < m.params().size(); ++i) {
    auto& g = m.params().at(i).mutable_grad();
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = 1e-3f * float(j % 7);
  }
  opt.step();
  TrainState st;
  st.step = 1;
  st.losses = {0.5};
  save_checkpoint(out, m, &opt, st);
  const Checkpoint c = load_checkpoint(out);
  XRir<float> back = model_from_checkpoint(c);
  ASSERT_EQ(back.params().size(), m.params().size());
  for (std::size_t i = 0; i < m.params().size(); ++i) {
    EXPECT_EQ(back.params().name(i), m.params().name(i));
    EXPECT_EQ(back.params().at(i).value(), m.params().at(i).value());
  }
  EXPECT_EQ(to_json(c.model).dump(), to_json(m.config()).dump());
  EXPECT_EQ(c.adam_steps, 1);
  Adam<float> opt2(back.params(), {});
  restore_optimizer(c, opt2);
  EXPECT_EQ(opt2.first_moments(), opt.first_moments());
  // Blob size is exactly the float payload of parameters and both moments.
  EXPECT_EQ(fs::file_size(out / "tensors.f32"), 3 * 4 * m.parameter_count());
  fs::remove_all(out);
}

TEST_F(SmallData, GroundTruthEvaluatesToZero) {
  const SplitSpec s = make_split(data_->manifest(), SplitMode::kUnseen, 5);
  EvalConfig cfg;
  cfg.method = Method::kGroundTruth;
  cfg.k = 2;
  const EvalReport r = evaluate(*data_, s, cfg);
  EXPECT_EQ(r.rows.size(), split_examples(*data_, s.test).size());
  EXPECT_EQ(r.overall.edt_err_s, 0.0);
  EXPECT_EQ(r.overall.c50_err_db, 0.0);
  EXPECT_EQ(r.overall.t60_err_pct, 0.0);
}

TEST_F(SmallData, AggregatesMatchRows) {
  const SplitSpec s = make_split(data_->manifest(), SplitMode::kUnseen, 5);
  EvalConfig cfg;
  cfg.method = Method::kLinearInterp;
  cfg.k = 3;
  const EvalReport r = evaluate(*data_, s, cfg);
  double edt = 0, c50 = 0, t60 = 0;
  int inc = 0;
  for (const auto& row : r.rows) {
    edt += row.edt_err_s;
    c50 += row.c50_err_db;
    if (row.t60_err_pct) {
      t60 += *row.t60_err_pct;
      ++inc;
    }
  }
  EXPECT_EQ(r.overall.count, static_cast<int>(r.rows.size()));
  EXPECT_EQ(r.overall.t60_included, inc);
  EXPECT_EQ(r.overall.t60_excluded, r.overall.count - inc);
  EXPECT_EQ(r.overall.edt_err_s, edt / r.rows.size());
  EXPECT_EQ(r.overall.c50_err_db, c50 / r.rows.size());
  if (inc) EXPECT_EQ(r.overall.t60_err_pct, t60 / inc);
  // Stored JSON aggregates reproduce from the CSV rows as well.
  const fs::path out = scratch("report");
  write_report(r, out);
  const auto j = read_json(out / "report.json");
  EXPECT_EQ(j.at("aggregate").at("edt_err_s").get<double>(), r.overall.edt_err_s);
  std::istringstream csv(slurp(out / "metrics.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "example_id,room_id,method,K,edt_err_s,c50_err_db,t60_err_pct,t60_valid");
  double edt_csv = 0;
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) {
    std::istringstream f(line);
    std::string cell;
    for (int c = 0; c < 5; ++c) std::getline(f, cell, ',');
    edt_csv += std::stod(cell);
    ++lines;
  }
  EXPECT_EQ(lines, r.overall.count);
  EXPECT_NEAR(edt_csv / lines, r.overall.edt_err_s, 1e-12);
  fs::remove_all(out);
}

TEST_F(SmallData, EmptyTestSideRejected) {
  SplitSpec s = make_split(data_->manifest(), SplitMode::kUnseen, 5);
  s.test.clear();
  EXPECT_THROW(evaluate(*data_, s, EvalConfig{}), Error);
}

TEST_F(SmallData, ReferencesSharedAcrossMethods) {
  const SplitSpec s = make_split(data_->manifest(), SplitMode::kUnseen, 5);
  const auto ex = split_examples(*data_, s.test).front();
  EXPECT_EQ(eval_references(*data_, ex, 3, 4), eval_references(*data_, ex, 3, 4));
  const auto r = eval_references(*data_, ex, 4, 4);
  EXPECT_EQ(std::set<int>(r.begin(), r.end()).size(), 4u);
}

TEST_F(SmallData, XRirPredictionIsFinite) {
  const SplitSpec s = make_split(data_->manifest(), SplitMode::kUnseen, 5);
  const XRir<float> model(small_model(), 1);
  EvalConfig cfg;
  cfg.method = Method::kXRir;
  cfg.k = 2;
  cfg.griffin_lim_iterations = 5;
  const EvalReport r = evaluate(*data_, s, cfg, &model);
  for (const auto& row : r.rows) {
    EXPECT_TRUE(std::isfinite(row.edt_err_s));
    EXPECT_TRUE(std::isfinite(row.c50_err_db));
  }
  EXPECT_THROW(evaluate(*data_, s, cfg), Error);  // model required
}

TEST(SafeMetrics, ZeroSignal) {
  const auto m = safe_metrics(std::vector<double>(9600, 0.0), 22050);
  EXPECT_EQ(m.edt, 0.0);
  EXPECT_EQ(m.c50, 0.0);
  EXPECT_FALSE(m.t60_valid);
}

TEST_F(SmallData, AcousticMapGrid) {
  AcousticMapConfig cfg;
  cfg.k = 2;
  cfg.resolution = 0.5;
  const AcousticMap a = acoustic_map(*data_, 0, 0, cfg);
  const AcousticMap b = acoustic_map(*data_, 0, 0, cfg);
  ASSERT_EQ(a.cells.size(), static_cast<std::size_t>(a.nx * a.ny));
  int valid = 0;
  const Room& room = data_->room(0);
  const double z = data_->placement(0).receivers[0].z();
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    const auto& c = a.cells[i];
    EXPECT_EQ(c.c50_gt, b.cells[i].c50_gt);
    const Vec3 p(c.x, c.y, z);
    if (c.valid) {
      ++valid;
      EXPECT_GE(room.distance_to_surfaces(p), 0.5 - 1e-9);
    } else if (room.contains(p)) {
      const bool near_wall = room.distance_to_surfaces(p) < 0.5;
      const bool near_rcv = (p - data_->placement(0).receivers[0]).norm() < 1.0;
      EXPECT_TRUE(near_wall || near_rcv);
    }
  }
  EXPECT_GT(valid, 0);
  const std::string csv = acoustic_map_csv(a);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,y,c50_pred,c50_gt,valid");
}

TEST(Io, Primitives) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  const fs::path out = scratch("io");
  const std::vector<double> v{1.5, -2.25, 3e-8};
  write_f32(out / "x.f32", v);
  const auto back = read_f32(out / "x.f32");
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[1], -2.25f);
  EXPECT_EQ(read_f32(out / "x.f32", 4, 1), std::vector<float>{-2.25f});
  EXPECT_THROW(read_f32(out / "missing.f32"), Error);
  EXPECT_NE(hash_hex("a"), hash_hex("b"));
  EXPECT_EQ(hash_hex("a").size(), 16u);
  fs::remove_all(out);
}

TEST(Parallel, CoversAndRethrowsLowest) {
  set_thread_override(3);
  std::vector<int> hit(100, 0);
  parallel_for(100, [&](std::size_t i) { hit[i]++; });
  for (int h : hit) EXPECT_EQ(h, 1);
  try {
    parallel_for(50, [](std::size_t i) {
      if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "7");
  }
  set_thread_override(0);
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "roomecho");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str() + err.str();
  return rc;
}

TEST(Cli, EndToEnd) {
  const fs::path root = scratch("cli");
  const std::string data = (root / "data").string();
  ASSERT_EQ(cli({"gen-data", "--rooms", "3", "--sources", "20", "--receivers", "2", "--seed", "7", "--out", data}), 0);
  EXPECT_TRUE(fs::exists(root / "data" / "manifest.json"));
  ASSERT_EQ(cli({"split", "--data", data, "--mode", "seen", "--seed", "1"}), 0);
  const std::string split = (root / "data" / "split-seen.json").string();
  std::string text;
  ASSERT_EQ(cli({"eval", "--data", data, "--split", split, "--method", "nearest", "--k", "8", "--json"}, &text), 0);
  EXPECT_NE(text.find("\"event\":\"eval\""), std::string::npos);
  const std::string csv = slurp(root / "data" / "reports" / "nearest-k8" / "metrics.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "example_id,room_id,method,K,edt_err_s,c50_err_db,t60_err_pct,t60_valid");
  EXPECT_EQ(cli({"inspect", "--data", data}), 0);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli({"no-such-command"}), 1);
  EXPECT_EQ(cli({}), 1);
  std::string text;
  EXPECT_EQ(cli({"gen-data", "--out", "/tmp/x", "--frobnicate"}, &text), 1);
  EXPECT_NE(text.find("Usage"), std::string::npos);
  EXPECT_EQ(cli({"gen-data", "--out", "/tmp/x", "--rooms", "4"}), 1);  // not a multiple of 3
  EXPECT_EQ(cli({"--help"}), 0);
  // Runtime failure: a directory that exists but holds no dataset.
  const fs::path empty = scratch("cli-empty");
  EXPECT_EQ(cli({"inspect", "--data", empty.string()}), 2);
}

}  // namespace
}  // namespace roomecho
