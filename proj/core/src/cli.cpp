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

#include "roomecho/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>

#include "roomecho/acoustic_map.hpp"
#include "roomecho/checkpoint.hpp"
#include "roomecho/dataset.hpp"
#include "roomecho/error.hpp"
#include "roomecho/evaluate.hpp"
#include "roomecho/io.hpp"
#include "roomecho/parallel.hpp"
#include "roomecho/split.hpp"
#include "roomecho/train.hpp"

namespace roomecho {

using nlohmann::json;

namespace {

struct Common {
  std::string config_file;
  std::uint64_t seed = 0;
  bool json_logs = false;
  int threads = 0;
  CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_file, "JSON config file with gen/model/train/eval sections")
      ->check(CLI::ExistingFile);
  c.seed_opt = app->add_option("--seed", c.seed, "Random seed");
  app->add_flag("--json", c.json_logs, "Emit machine-readable JSON log lines");
  app->add_option("--threads", c.threads, "Worker threads (overrides ROOMECHO_THREADS)")
      ->check(CLI::NonNegativeNumber);
}

class Logger {
 public:
  Logger(std::ostream& out, bool json_mode) : out_(out), json_(json_mode) {}
  void event(const std::string& name, const json& fields, const std::string& text) {
    if (json_) {
      json j = fields;
      j["event"] = name;
      out_ << j.dump() << "\n";
    } else {
      out_ << text << "\n";
    }
    out_.flush();
  }

 private:
  std::ostream& out_;
  bool json_;
};

json config_section(const Common& c, const char* section) {
  if (c.config_file.empty()) return json::object();
  const json j = read_json(c.config_file);
  require(j.is_object(), ErrorCode::kConfig, "config file must hold a JSON object");
  for (const auto& [key, _] : j.items()) {
    require(key == "gen" || key == "model" || key == "train" || key == "eval" || key == "split",
            ErrorCode::kConfig, "unknown config section '" + key + "'");
  }
  return j.value(section, json::object());
}

ModelConfig preset(const std::string& name) {
  if (name == "full") return ModelConfig::full();
  if (name == "compact") return ModelConfig::compact();
  if (name == "tiny") return ModelConfig::tiny();
  throw CLI::ValidationError("--preset", "expected full, compact or tiny");
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

int run_cli(int argc, char** argv) { return run_cli(argc, argv, std::cout, std::cerr); }

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"roomecho: room impulse response simulation, prediction and evaluation"};
  app.require_subcommand(1);
  app.fallthrough(false);

  // gen-data
  Common gen_c;
  std::string gen_out;
  int gen_rooms = 0, gen_sources = 0, gen_receivers = 0;
  auto* gen = app.add_subcommand("gen-data", "Simulate a dataset of rooms and RIRs");
  add_common(gen, gen_c);
  gen->add_option("--out", gen_out, "Output directory")->required();
  auto* rooms_opt = gen->add_option("--rooms", gen_rooms, "Total room count (split evenly over categories)")
                        ->check(CLI::PositiveNumber);
  auto* src_opt = gen->add_option("--sources", gen_sources, "Sources per room")->check(CLI::PositiveNumber);
  auto* rcv_opt = gen->add_option("--receivers", gen_receivers, "Receivers per room")->check(CLI::PositiveNumber);

  // split
  Common split_c;
  std::string split_data, split_mode = "unseen", split_out;
  double split_fraction = 0.1;
  auto* split = app.add_subcommand("split", "Partition a dataset into train and test sides");
  add_common(split, split_c);
  split->add_option("--data", split_data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  split->add_option("--mode", split_mode, "seen or unseen")->check(CLI::IsMember({"seen", "unseen"}));
  split->add_option("--test-fraction", split_fraction, "Held-out fraction")->check(CLI::Range(0.0, 1.0));
  split->add_option("--out", split_out, "Split file (default <data>/split-<mode>.json)");

  // train
  Common train_c;
  std::string train_data, train_split, train_out, train_resume, train_preset = "compact";
  std::int64_t train_steps = 0;
  int train_batch = 0, train_k = 0;
  double train_lr = 0.0, train_max_seconds = 0.0;
  std::vector<std::string> train_ablations;
  auto* train = app.add_subcommand("train", "Train the xRIR model");
  add_common(train, train_c);
  train->add_option("--data", train_data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  train->add_option("--split", train_split, "Split file")->required()->check(CLI::ExistingFile);
  train->add_option("--out", train_out, "Checkpoint directory")->required();
  auto* preset_opt = train->add_option("--preset", train_preset, "Model size: full, compact or tiny");
  auto* steps_opt = train->add_option("--steps", train_steps, "Total optimizer steps")->check(CLI::NonNegativeNumber);
  auto* batch_opt = train->add_option("--batch-size", train_batch, "Batch size")->check(CLI::PositiveNumber);
  auto* lr_opt = train->add_option("--lr", train_lr, "Learning rate")->check(CLI::PositiveNumber);
  auto* k_opt = train->add_option("--k", train_k, "Reference count")->check(CLI::PositiveNumber);
  auto* max_s_opt = train->add_option("--max-seconds", train_max_seconds, "Wall-clock cap");
  train->add_option("--ablation", train_ablations, "no-reference-rirs, no-direct-path, no-reflection-module")
      ->check(CLI::IsMember({"no-reference-rirs", "no-direct-path", "no-reflection-module"}));
  train->add_option("--resume", train_resume, "Checkpoint to continue from")->check(CLI::ExistingDirectory);

  // eval
  Common eval_c;
  std::string eval_data, eval_split, eval_method = "nearest", eval_ckpt, eval_out;
  int eval_k = 4;
  bool eval_no_align = false;
  auto* ev = app.add_subcommand("eval", "Evaluate a method on the test side of a split");
  add_common(ev, eval_c);
  ev->add_option("--data", eval_data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--split", eval_split, "Split file")->required()->check(CLI::ExistingFile);
  auto* method_opt = ev->add_option("--method", eval_method,
                                    "xrir, random-across, random-same, nearest, linear-interp, ground-truth");
  auto* evk_opt = ev->add_option("--k", eval_k, "Reference count")->check(CLI::PositiveNumber);
  ev->add_option("--checkpoint", eval_ckpt, "Checkpoint directory (xrir)")->check(CLI::ExistingDirectory);
  ev->add_option("--out", eval_out, "Report directory (default <data>/reports/<method>-k<K>)");
  auto* noalign_opt = ev->add_flag("--no-align", eval_no_align, "Disable baseline time-shift alignment");

  // acoustic-map
  Common map_c;
  std::string map_data, map_room, map_method = "nearest", map_ckpt, map_out;
  int map_receiver = 0, map_k = 4;
  double map_res = 0.5;
  auto* am = app.add_subcommand("acoustic-map", "C50 map over a source grid for one receiver");
  add_common(am, map_c);
  am->add_option("--data", map_data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  am->add_option("--room", map_room, "Room id")->required();
  am->add_option("--receiver", map_receiver, "Receiver index")->check(CLI::NonNegativeNumber);
  am->add_option("--resolution", map_res, "Grid spacing in meters")->check(CLI::PositiveNumber);
  am->add_option("--method", map_method, "nearest, linear-interp or xrir");
  am->add_option("--k", map_k, "Reference count")->check(CLI::PositiveNumber);
  am->add_option("--checkpoint", map_ckpt, "Checkpoint directory (xrir)")->check(CLI::ExistingDirectory);
  am->add_option("--out", map_out, "Output directory")->required();

  // inspect
  Common insp_c;
  std::string insp_data, insp_ckpt;
  auto* insp = app.add_subcommand("inspect", "Summarize a dataset or checkpoint");
  add_common(insp, insp_c);
  insp->add_option("--data", insp_data, "Dataset directory")->check(CLI::ExistingDirectory);
  insp->add_option("--checkpoint", insp_ckpt, "Checkpoint directory")->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (gen->parsed()) {
      set_thread_override(gen_c.threads);
      Logger log(out, gen_c.json_logs);
      GenConfig g = gen_config_from_json(config_section(gen_c, "gen"));
      if (gen_c.seed_opt->count()) g.seed = gen_c.seed;
      if (rooms_opt->count()) {
        const int ncat = static_cast<int>(g.categories.size());
        if (gen_rooms % ncat != 0) {
          throw CLI::ValidationError("--rooms", "must be a multiple of the " + std::to_string(ncat) +
                                                    " room categories");
        }
        g.rooms_per_category = gen_rooms / ncat;
      }
      if (src_opt->count()) g.sources_per_room = gen_sources;
      if (rcv_opt->count()) g.receivers_per_room = gen_receivers;
      g = gen_config_from_json(json::object(), g);
      const auto t0 = std::chrono::steady_clock::now();
      const auto m = generate_dataset(g, gen_out);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      log.event("gen-data", {{"rooms", m.rooms.size()}, {"rirs", m.rirs.size()}, {"out", gen_out},
                             {"warnings", m.warnings.size()}, {"seconds", secs}},
                "wrote " + std::to_string(m.rooms.size()) + " rooms / " + std::to_string(m.rirs.size()) +
                    " RIRs to " + gen_out + " in " + fmt(secs) + " s");
      return 0;
    }

    if (split->parsed()) {
      Logger log(out, split_c.json_logs);
      const json section = config_section(split_c, "split");
      std::string mode = section.value("mode", split_mode);
      if (split->count("--mode")) mode = split_mode;
      double fraction = section.value("test_fraction", split_fraction);
      if (split->count("--test-fraction")) fraction = split_fraction;
      const std::uint64_t seed = split_c.seed_opt->count() ? split_c.seed : section.value("seed", std::uint64_t{0});
      const auto manifest = manifest_from_json(read_json(fs::path(split_data) / "manifest.json"));
      const SplitSpec s = make_split(manifest, split_mode_from_string(mode), seed, fraction);
      const fs::path dest = split_out.empty() ? fs::path(split_data) / ("split-" + mode + ".json") : fs::path(split_out);
      write_json(dest, to_json(s));
      log.event("split", {{"mode", mode}, {"train", s.train.size()}, {"test", s.test.size()}, {"out", dest.string()}},
                mode + " split: " + std::to_string(s.train.size()) + " train / " + std::to_string(s.test.size()) +
                    " test receivers -> " + dest.string());
      return 0;
    }

    if (train->parsed()) {
      set_thread_override(train_c.threads);
      Logger log(out, train_c.json_logs);
      const json msec = config_section(train_c, "model");
      ModelConfig base = preset(msec.value("preset", train_preset));
      if (preset_opt->count()) base = preset(train_preset);
      json mjson = msec;
      mjson.erase("preset");
      ModelConfig mcfg = model_config_from_json(mjson, base);
      if (k_opt->count()) mcfg.k = train_k;
      for (const auto& a : train_ablations) {
        if (a == "no-reference-rirs") mcfg.no_reference_rirs = true;
        if (a == "no-direct-path") mcfg.no_direct_path = true;
        if (a == "no-reflection-module") mcfg.no_reflection_module = true;
      }
      validate(mcfg);
      TrainConfig tcfg = train_config_from_json(config_section(train_c, "train"));
      if (train_c.seed_opt->count()) tcfg.seed = train_c.seed;
      if (steps_opt->count()) tcfg.steps = train_steps;
      if (batch_opt->count()) tcfg.batch_size = train_batch;
      if (lr_opt->count()) tcfg.adam.learning_rate = train_lr;
      if (max_s_opt->count()) tcfg.max_seconds = train_max_seconds;

      const Dataset data = Dataset::load(train_data);
      const SplitSpec s = split_from_json(read_json(train_split));
      std::optional<Checkpoint> resume;
      if (!train_resume.empty()) {
        resume = load_checkpoint(train_resume);
        mcfg = resume->model;
      }
      Trainer trainer(data, s, mcfg, tcfg);
      if (resume) trainer.resume(*resume);
      log.event("train-start", {{"parameters", trainer.model().parameter_count()}, {"steps", tcfg.steps}},
                "training " + std::to_string(trainer.model().parameter_count()) + " parameters for " +
                    std::to_string(tcfg.steps) + " steps");
      trainer.run(train_out, [&](const StepLog& l) {
        if (l.step % 10 == 0 || l.step == tcfg.steps) {
          log.event("step", {{"step", l.step}, {"loss", l.loss.total}, {"grad_norm", l.grad_norm}},
                    "step " + std::to_string(l.step) + " loss " + fmt(l.loss.total));
        }
      });
      log.event("train-done", {{"steps", trainer.state().step}, {"out", train_out}},
                "saved " + (fs::path(train_out) / "final").string());
      return 0;
    }

    if (ev->parsed()) {
      set_thread_override(eval_c.threads);
      Logger log(out, eval_c.json_logs);
      const json section = config_section(eval_c, "eval");
      EvalConfig cfg;
      cfg.method = method_from_string(method_opt->count() ? eval_method : section.value("method", eval_method));
      cfg.k = evk_opt->count() ? eval_k : section.value("k", eval_k);
      cfg.seed = eval_c.seed_opt->count() ? eval_c.seed : section.value("seed", std::uint64_t{0});
      cfg.align = noalign_opt->count() ? !eval_no_align : section.value("align", true);
      cfg.griffin_lim_iterations = section.value("griffin_lim_iterations", 60);
      const Dataset data = Dataset::load(eval_data);
      const SplitSpec s = split_from_json(read_json(eval_split));
      std::optional<XRir<float>> model;
      if (!eval_ckpt.empty()) model.emplace(model_from_checkpoint(load_checkpoint(eval_ckpt)));
      const EvalReport r = evaluate(data, s, cfg, model ? &*model : nullptr);
      const fs::path dest = eval_out.empty()
                                ? fs::path(eval_data) / "reports" / (r.method + "-k" + std::to_string(cfg.k))
                                : fs::path(eval_out);
      write_report(r, dest);
      log.event("eval",
                {{"method", r.method}, {"k", r.k}, {"examples", r.overall.count},
                 {"edt_err_s", r.overall.edt_err_s}, {"c50_err_db", r.overall.c50_err_db},
                 {"t60_err_pct", r.overall.t60_err_pct}, {"t60_excluded", r.overall.t60_excluded},
                 {"out", dest.string()}},
                r.method + " K=" + std::to_string(r.k) + ": EDT " + fmt(r.overall.edt_err_s) + " s, C50 " +
                    fmt(r.overall.c50_err_db) + " dB, T60 " + fmt(r.overall.t60_err_pct) + " % (" +
                    std::to_string(r.overall.t60_excluded) + " excluded) -> " + dest.string());
      return 0;
    }

    if (am->parsed()) {
      set_thread_override(map_c.threads);
      Logger log(out, map_c.json_logs);
      AcousticMapConfig cfg;
      cfg.method = method_from_string(map_method);
      cfg.k = map_k;
      cfg.resolution = map_res;
      cfg.seed = map_c.seed;
      const Dataset data = Dataset::load(map_data);
      std::optional<XRir<float>> model;
      if (!map_ckpt.empty()) model.emplace(model_from_checkpoint(load_checkpoint(map_ckpt)));
      const auto m = acoustic_map(data, data.room_index(map_room), map_receiver, cfg, model ? &*model : nullptr);
      const fs::path dir(map_out);
      write_text(dir / "map.csv", acoustic_map_csv(m));
      write_acoustic_map_pgm(m, dir / "map_pred.pgm");
      write_acoustic_map_pgm(m, dir / "map_gt.pgm", true);
      log.event("acoustic-map", {{"room", map_room}, {"nx", m.nx}, {"ny", m.ny}, {"out", map_out}},
                "wrote " + std::to_string(m.nx) + "x" + std::to_string(m.ny) + " map to " + map_out);
      return 0;
    }

    if (insp->parsed()) {
      Logger log(out, insp_c.json_logs);
      if (insp_data.empty() == insp_ckpt.empty()) {
        throw CLI::ValidationError("inspect", "pass exactly one of --data or --checkpoint");
      }
      if (!insp_data.empty()) {
        const Dataset data = Dataset::load(insp_data);
        json rooms = json::array();
        std::ostringstream text;
        text << data.room_count() << " rooms, " << data.manifest().rirs.size() << " RIRs\n";
        for (std::size_t i = 0; i < data.room_count(); ++i) {
          const auto& e = data.entry(i);
          rooms.push_back({{"id", e.id}, {"category", e.category}, {"kind", e.kind},
                           {"sources", data.placement(i).sources.size()},
                           {"receivers", data.placement(i).receivers.size()},
                           {"sabine_t60", e.sabine_t60}});
          text << "  " << e.id << " (" << e.kind << ") " << data.placement(i).sources.size() << " src, "
               << data.placement(i).receivers.size() << " rcv, Sabine T60 " << fmt(e.sabine_t60) << " s\n";
        }
        std::string t = text.str();
        t.pop_back();
        log.event("inspect", {{"rooms", rooms}, {"rirs", data.manifest().rirs.size()}}, t);
      } else {
        const Checkpoint c = load_checkpoint(insp_ckpt);
        std::size_t n = 0;
        for (const auto& p : c.params) n += p.values.size();
        log.event("inspect", {{"parameters", n}, {"tensors", c.params.size()}, {"step", c.state.step},
                              {"model", to_json(c.model)}},
                  std::to_string(c.params.size()) + " tensors, " + std::to_string(n) +
                      " parameters, step " + std::to_string(c.state.step));
      }
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace roomecho
