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

#include "roomecho/evaluate.hpp"

#include <algorithm>
#include <cmath>

#include "roomecho/baselines.hpp"
#include "roomecho/checkpoint.hpp"
#include "roomecho/error.hpp"
#include "roomecho/io.hpp"
#include "roomecho/parallel.hpp"
#include "roomecho/random.hpp"

namespace roomecho {

using nlohmann::json;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kXRir: return "xrir";
    case Method::kRandomAcross: return "random-across";
    case Method::kRandomSame: return "random-same";
    case Method::kNearest: return "nearest";
    case Method::kLinearInterp: return "linear-interp";
    case Method::kGroundTruth: return "ground-truth";
  }
  return "unknown";
}

Method method_from_string(std::string_view s) {
  for (Method m : {Method::kXRir, Method::kRandomAcross, Method::kRandomSame, Method::kNearest,
                   Method::kLinearInterp, Method::kGroundTruth}) {
    if (to_string(m) == s) return m;
  }
  fail(ErrorCode::kConfig, "unknown method '" + std::string(s) +
                               "' (expected xrir, random-across, random-same, nearest, "
                               "linear-interp or ground-truth)");
}

AcousticMetrics safe_metrics(std::span<const double> waveform, double sample_rate) {
  AcousticMetrics m;
  if (std::all_of(waveform.begin(), waveform.end(), [](double v) { return v == 0.0; })) return m;
  try {
    m.edt = metric_edt(waveform, sample_rate);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kMetricUndefined) throw;
    m.edt = static_cast<double>(waveform.size()) / sample_rate;
  }
  const C50 c = metric_c50(waveform, sample_rate);
  m.c50 = c.db;
  m.c50_clamped = c.clamped;
  const T60 t = metric_t60(waveform, sample_rate);
  m.t60 = t.seconds;
  m.t60_valid = t.valid;
  return m;
}

MetricMeans aggregate(const std::vector<ExampleMetrics>& rows) {
  MetricMeans a;
  double edt = 0.0, c50 = 0.0, t60 = 0.0;
  for (const auto& r : rows) {
    edt += r.edt_err_s;
    c50 += r.c50_err_db;
    if (r.t60_err_pct) {
      t60 += *r.t60_err_pct;
      ++a.t60_included;
    } else {
      ++a.t60_excluded;
    }
  }
  a.count = static_cast<int>(rows.size());
  if (a.count > 0) {
    a.edt_err_s = edt / a.count;
    a.c50_err_db = c50 / a.count;
  }
  if (a.t60_included > 0) a.t60_err_pct = t60 / a.t60_included;
  return a;
}

std::vector<int> eval_references(const Dataset& data, const Example& ex, int k, std::uint64_t seed) {
  Rng rng(SeedHasher(seed)
              .add(std::string_view("eval-refs"))
              .add(ex.id)
              .add(static_cast<std::uint64_t>(k))
              .value());
  return choose_references(data.placement(ex.room), k, rng);
}

namespace {

std::uint64_t pick_seed(const EvalConfig& cfg, const Example& ex) {
  return SeedHasher(cfg.seed).add(to_string(cfg.method)).add(ex.id).value();
}

}  // namespace

std::vector<double> predict_waveform(const Dataset& data, const SplitSpec& split, const Example& ex,
                                     const std::vector<int>& references, const EvalConfig& cfg,
                                     const XRir<float>* model, CoordCache* coords) {
  switch (cfg.method) {
    case Method::kGroundTruth:
      return data.waveform(ex.room, ex.receiver, ex.source);
    case Method::kRandomAcross: {
      // The pool is every recording on the training side.
      std::vector<std::tuple<std::size_t, int, int>> pool;
      for (const auto& [room_id, rcv] : split.train) {
        const std::size_t room = data.room_index(room_id);
        const int n_src = static_cast<int>(data.placement(room).sources.size());
        for (int s = 0; s < n_src; ++s) pool.emplace_back(room, rcv, s);
      }
      const auto [room, rcv, src] = pool[random_pick(pool.size(), pick_seed(cfg, ex))];
      return data.waveform(room, rcv, src);
    }
    case Method::kRandomSame: {
      // Any other recording from the target's room.
      const auto& p = data.placement(ex.room);
      std::vector<std::pair<int, int>> pool;
      for (int r = 0; r < static_cast<int>(p.receivers.size()); ++r) {
        for (int s = 0; s < static_cast<int>(p.sources.size()); ++s) {
          if (r != ex.receiver || s != ex.source) pool.emplace_back(r, s);
        }
      }
      const auto [rcv, src] = pool[random_pick(pool.size(), pick_seed(cfg, ex))];
      return data.waveform(ex.room, rcv, src);
    }
    case Method::kNearest:
    case Method::kLinearInterp: {
      std::vector<RIRRecord> recs;
      for (int r : references) recs.push_back(data.record(ex.room, ex.receiver, r));
      const ReferenceSet set = make_reference_set(std::move(recs));
      const Vec3& target = data.placement(ex.room).sources.at(ex.source);
      return cfg.method == Method::kNearest
                 ? predict_nearest(set, target, cfg.align, data.sim())
                 : predict_linear_interp(set, target, cfg.align, data.sim());
    }
    case Method::kXRir: {
      require(model != nullptr && coords != nullptr, ErrorCode::kConfig,
              "xrir evaluation needs a model checkpoint");
      const ModelInput in = build_model_input(data, *coords, model->config(), ex.room, ex.receiver,
                                              ex.source, references);
      const auto trace = model->forward(in);
      const Eigen::MatrixXd mag = to_matrix(trace.s_pred).array().exp().matrix();
      GriffinLimOptions gl;
      gl.iterations = cfg.griffin_lim_iterations;
      gl.seed = 0;
      return griffin_lim(mag, gl);
    }
  }
  fail(ErrorCode::kConfig, "unhandled method");
}

EvalReport evaluate(const Dataset& data, const SplitSpec& split, const EvalConfig& cfg,
                    const XRir<float>* model) {
  const auto examples = split_examples(data, split.test);
  require(!examples.empty(), ErrorCode::kEmptyDataset, "the test side has no examples");
  if (cfg.method == Method::kXRir) {
    require(model != nullptr, ErrorCode::kConfig, "xrir evaluation needs a model checkpoint");
    require(model->config().k == cfg.k, ErrorCode::kConfig,
            "checkpoint was trained with K = " + std::to_string(model->config().k));
  }
  std::optional<CoordCache> coords;
  if (model) coords.emplace(data, model->config().map_height, model->config().map_width);

  EvalReport report;
  report.method = std::string(to_string(cfg.method));
  report.k = cfg.k;
  report.split = std::string(to_string(split.mode));
  report.seed = cfg.seed;
  report.aligned = cfg.align;
  report.rows.resize(examples.size());
  const double fs = data.sim().sample_rate;
  parallel_for(examples.size(), [&](std::size_t i) {
    const Example& ex = examples[i];
    const auto refs = eval_references(data, ex, cfg.k, cfg.seed);
    const auto pred = predict_waveform(data, split, ex, refs, cfg, model, coords ? &*coords : nullptr);
    const auto gt = data.waveform(ex.room, ex.receiver, ex.source);
    const AcousticMetrics mp = safe_metrics(pred, fs);
    const AcousticMetrics mg = safe_metrics(gt, fs);
    ExampleMetrics row;
    row.example_id = ex.id;
    row.room_id = data.entry(ex.room).id;
    row.edt_err_s = std::abs(mp.edt - mg.edt);
    row.c50_err_db = std::abs(mp.c50 - mg.c50);
    if (mp.t60_valid && mg.t60_valid) row.t60_err_pct = t60_pct_error(mp.t60, mg.t60);
    report.rows[i] = std::move(row);
  });
  report.overall = aggregate(report.rows);
  std::map<std::string, std::vector<ExampleMetrics>> by_room;
  for (const auto& r : report.rows) by_room[r.room_id].push_back(r);
  for (const auto& [room, rows] : by_room) report.per_room[room] = aggregate(rows);

  json hashed{{"method", report.method},
              {"k", cfg.k},
              {"seed", cfg.seed},
              {"align", cfg.align},
              {"griffin_lim_iterations", cfg.griffin_lim_iterations},
              {"split", to_json(split)},
              {"dataset_seed", data.manifest().seed}};
  if (model && cfg.method == Method::kXRir) hashed["model"] = to_json(model->config());
  report.config_hash = hash_hex(hashed.dump());
  return report;
}

namespace {

json means_json(const MetricMeans& m) {
  json j{{"edt_err_s", m.edt_err_s},
         {"c50_err_db", m.c50_err_db},
         {"count", m.count},
         {"t60_included", m.t60_included},
         {"t60_excluded", m.t60_excluded}};
  j["t60_err_pct"] = m.t60_included > 0 ? json(m.t60_err_pct) : json(nullptr);
  return j;
}

}  // namespace

json to_json(const EvalReport& r) {
  json per_room = json::object();
  for (const auto& [room, m] : r.per_room) per_room[room] = means_json(m);
  json rows = json::array();
  for (const auto& e : r.rows) {
    rows.push_back({{"example_id", e.example_id},
                    {"room_id", e.room_id},
                    {"edt_err_s", e.edt_err_s},
                    {"c50_err_db", e.c50_err_db},
                    {"t60_err_pct", e.t60_err_pct ? json(*e.t60_err_pct) : json(nullptr)}});
  }
  return json{{"method", r.method},
              {"k", r.k},
              {"split", r.split},
              {"seed", r.seed},
              {"time_shift_aligned", r.aligned},
              {"interpolation", "inverse-distance"},
              {"config_hash", r.config_hash},
              {"aggregate", means_json(r.overall)},
              {"per_room", per_room},
              {"examples", rows}};
}

std::string metrics_csv(const EvalReport& r) {
  std::string out = "example_id,room_id,method,K,edt_err_s,c50_err_db,t60_err_pct,t60_valid\n";
  for (const auto& e : r.rows) {
    out += csv_field(e.example_id) + "," + csv_field(e.room_id) + "," + csv_field(r.method) + "," +
           std::to_string(r.k) + "," + format_double(e.edt_err_s) + "," + format_double(e.c50_err_db) +
           "," + (e.t60_err_pct ? format_double(*e.t60_err_pct) : std::string()) + "," +
           (e.t60_err_pct ? "1" : "0") + "\n";
  }
  return out;
}

void write_report(const EvalReport& r, const fs::path& dir) {
  fs::create_directories(dir);
  write_json(dir / "report.json", to_json(r));
  write_text(dir / "metrics.csv", metrics_csv(r));
}

}  // namespace roomecho
