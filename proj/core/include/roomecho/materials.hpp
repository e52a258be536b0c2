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

#include <string>
#include <string_view>
#include <vector>

#include "roomecho/random.hpp"

namespace roomecho {

struct Material {
  std::string id;
  std::string category;
  double absorption = 0.0;  // broadband energy absorption, (0, 1]
};

class MaterialLibrary {
 public:
  explicit MaterialLibrary(std::vector<Material> materials);

  const std::vector<Material>& materials() const { return materials_; }
  std::vector<std::string> categories() const;
  const Material& get(std::string_view id) const;
  bool contains(std::string_view id) const;
  const Material& sample(Rng& rng) const;

 private:
  std::vector<Material> materials_;
};

// 11 categories x 4 broadband materials.
const MaterialLibrary& default_material_library();

}  // namespace roomecho
