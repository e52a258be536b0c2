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
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "roomecho/dataset.hpp"
#include "roomecho/dsp.hpp"
#include "roomecho/model.hpp"
#include "roomecho/split.hpp"
#include "roomecho/train.hpp"

namespace roomecho {

enum class Method { kXRir, kRandomAcross, kRandomSame, kNearest, kLinearInterp, kGroundTruth };

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

struct EvalConfig {
  Method method = Method::kNearest;
  int k = 4;
  std::uint64_t seed = 0;
  // Time-shift alignment of references for the nearest / interpolation baselines.
  bool align = true;
  int griffin_lim_iterations = 60;
};

struct ExampleMetrics {
  std::string example_id;
  std::string room_id;
  double edt_err_s = 0.0;
  double c50_err_db = 0.0;
  std::optional<double> t60_err_pct;  // nullopt when excluded
};

struct MetricMeans {
  double edt_err_s = 0.0;
  double c50_err_db = 0.0;
  double t60_err_pct = 0.0;
  int count = 0;
  int t60_included = 0;
  int t60_excluded = 0;
};

struct EvalReport {
  std::string method;
  int k = 0;
  std::string split;
  std::uint64_t seed = 0;
  bool aligned = true;
  std::string config_hash;
  std::vector<ExampleMetrics> rows;
  MetricMeans overall;
  std::map<std::string, MetricMeans> per_room;
};

// Metrics that tolerate an all-zero prediction: EDT and C50 fall back to 0
// and T60 is invalid.
AcousticMetrics safe_metrics(std::span<const double> waveform, double sample_rate);

MetricMeans aggregate(const std::vector<ExampleMetrics>& rows);

// Waveform predicted by a method for one example. `model` is required for
// kXRir and ignored otherwise.
std::vector<double> predict_waveform(const Dataset& data, const SplitSpec& split, const Example& ex,
                                     const std::vector<int>& references, const EvalConfig& cfg,
                                     const XRir<float>* model, CoordCache* coords);

// The references used for an example depend only on (seed, example id, K),
// so every method sees the same references.
std::vector<int> eval_references(const Dataset& data, const Example& ex, int k, std::uint64_t seed);

EvalReport evaluate(const Dataset& data, const SplitSpec& split, const EvalConfig& cfg,
                    const XRir<float>* model = nullptr);

nlohmann::json to_json(const EvalReport& r);
std::string metrics_csv(const EvalReport& r);
// Writes report.json and metrics.csv into dir.
void write_report(const EvalReport& r, const std::filesystem::path& dir);

}  // namespace roomecho
