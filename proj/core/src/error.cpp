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

#include "roomecho/error.hpp"

namespace roomecho {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidGeometry: return "invalid-geometry";
    case ErrorCode::kPlacementInfeasible: return "placement-infeasible";
    case ErrorCode::kInvalidViewpoint: return "invalid-viewpoint";
    case ErrorCode::kInvalidPlacement: return "invalid-placement";
    case ErrorCode::kInfiniteReverberation: return "infinite-reverberation";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kEmptySignal: return "empty-signal";
    case ErrorCode::kMetricUndefined: return "metric-undefined";
    case ErrorCode::kDegenerateShift: return "degenerate-shift";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kSplitInfeasible: return "split-infeasible";
    case ErrorCode::kEmptyDataset: return "empty-dataset";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kFormat: return "format";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace roomecho
