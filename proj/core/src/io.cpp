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

#include "roomecho/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "roomecho/error.hpp"

namespace roomecho {

namespace {

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
  return v;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  return out;
}

template <class V>
std::uint64_t append_impl(std::ostream& out, std::span<const V> values) {
  std::vector<std::uint32_t> buf(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float f = static_cast<float>(values[i]);
    std::uint32_t bits = 0;
    std::memcpy(&bits, &f, sizeof(bits));
    buf[i] = to_le(bits);
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(std::uint32_t)));
  require(out.good(), ErrorCode::kIo, "write failed");
  return buf.size() * sizeof(std::uint32_t);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::uint64_t append_f32(std::ostream& out, std::span<const double> values) {
  return append_impl(out, values);
}
std::uint64_t append_f32(std::ostream& out, std::span<const float> values) {
  return append_impl(out, values);
}

void write_f32(const fs::path& path, std::span<const float> values) {
  auto out = open_out(path);
  append_f32(out, values);
}

void write_f32(const fs::path& path, std::span<const double> values) {
  auto out = open_out(path);
  append_f32(out, values);
}

std::vector<float> read_f32(const fs::path& path, std::uint64_t byte_offset, std::size_t count) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kIo, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::uint64_t>(in.tellg());
  require(byte_offset <= size && (size - byte_offset) % 4 == 0, ErrorCode::kFormat,
          path.string() + ": offset does not address float32 data");
  const std::uint64_t available = (size - byte_offset) / 4;
  if (count == kReadAll) count = static_cast<std::size_t>(available);
  require(count <= available, ErrorCode::kFormat,
          path.string() + ": requested " + std::to_string(count) + " floats past the end");
  std::vector<std::uint32_t> buf(count);
  in.seekg(static_cast<std::streamoff>(byte_offset));
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count * 4));
  require(in.good() || count == 0, ErrorCode::kIo, "read failed for " + path.string());
  std::vector<float> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t bits = to_le(buf[i]);
    std::memcpy(&out[i], &bits, sizeof(bits));
  }
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  auto out = open_out(path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  require(out.good(), ErrorCode::kIo, "write failed for " + path.string());
}

nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string hash_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

void write_pgm(const fs::path& path, int width, int height, std::span<const std::uint8_t> pixels) {
  require(width > 0 && height > 0 && pixels.size() == static_cast<std::size_t>(width) * height,
          ErrorCode::kShape, "image size mismatch");
  auto out = open_out(path);
  out << "P5\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  require(out.good(), ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace roomecho
