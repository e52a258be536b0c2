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
#include <limits>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace roomecho {

namespace fs = std::filesystem;

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

// Raw little-endian float32 files.
void write_f32(const fs::path& path, std::span<const float> values);
void write_f32(const fs::path& path, std::span<const double> values);
// Appends and returns the number of bytes written.
std::uint64_t append_f32(std::ostream& out, std::span<const double> values);
std::uint64_t append_f32(std::ostream& out, std::span<const float> values);
inline constexpr std::size_t kReadAll = std::numeric_limits<std::size_t>::max();
std::vector<float> read_f32(const fs::path& path, std::uint64_t byte_offset = 0,
                            std::size_t count = kReadAll);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, std::string_view text);
nlohmann::json read_json(const fs::path& path);
// Pretty-printed with sorted keys and a trailing newline.
void write_json(const fs::path& path, const nlohmann::json& j);

// RFC-4180 field quoting.
std::string csv_field(std::string_view s);

// 16 hex digits of FNV-1a over the bytes.
std::string hash_hex(std::string_view bytes);

// Binary 8-bit grayscale image.
void write_pgm(const fs::path& path, int width, int height, std::span<const std::uint8_t> pixels);

}  // namespace roomecho
