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

#include "roomecho/optim.hpp"

#include <cmath>

#include "roomecho/error.hpp"

namespace roomecho {

template <class T>
Adam<T>::Adam(ParamStore<T>& params, const AdamConfig& cfg) : params_(params), cfg_(cfg) {
  require(cfg.learning_rate > 0.0 && cfg.beta1 >= 0.0 && cfg.beta1 < 1.0 && cfg.beta2 >= 0.0 &&
              cfg.beta2 < 1.0 && cfg.epsilon > 0.0,
          ErrorCode::kConfig, "invalid optimizer settings");
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_.emplace_back(params.at(i).size(), T(0));
    v_.emplace_back(params.at(i).size(), T(0));
  }
}

template <class T>
double Adam<T>::step() {
  double sq = 0.0;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    for (T g : params_.at(i).grad()) sq += static_cast<double>(g) * g;
  }
  const double norm = std::sqrt(sq);
  require(std::isfinite(norm), ErrorCode::kNumeric, "non-finite gradient norm");
  const double clip = (cfg_.clip_norm > 0.0 && norm > cfg_.clip_norm) ? cfg_.clip_norm / norm : 1.0;

  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_.at(i);
    auto& w = p.mutable_value();
    const auto& grad = p.grad();
    if (grad.empty()) continue;
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double g = grad[j] * clip;
      m[j] = static_cast<T>(b1 * m[j] + (1.0 - b1) * g);
      v[j] = static_cast<T>(b2 * v[j] + (1.0 - b2) * g * g);
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      w[j] = static_cast<T>(w[j] - cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon));
    }
  }
  return norm;
}

template class Adam<float>;
template class Adam<double>;

}  // namespace roomecho
