// Copyright 2026 The qrc-floquet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Little-endian binary helpers shared by the cache/checkpoint writers.

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <type_traits>

#include "qrc/error.hpp"

namespace qrc::detail {

static_assert(std::endian::native == std::endian::little,
              "cache formats assume a little-endian host");

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open for reading: " + path.string());
  return in;
}

template <typename T>
  requires std::is_trivially_copyable_v<T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
  requires std::is_trivially_copyable_v<T>
void write_array(std::ostream& out, std::span<const T> v) {
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
}

template <typename T>
  requires std::is_trivially_copyable_v<T>
T read_pod(std::istream& in, const std::filesystem::path& path) {
  T v{};
  const auto offset = static_cast<long long>(in.tellg());
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw IngestError(path.string() + ": truncated at byte offset " + std::to_string(offset));
  }
  return v;
}

template <typename T>
  requires std::is_trivially_copyable_v<T>
void read_array(std::istream& in, std::span<T> v, const std::filesystem::path& path) {
  const auto offset = static_cast<long long>(in.tellg());
  if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()))) {
    throw IngestError(path.string() + ": truncated payload starting at byte offset " +
                      std::to_string(offset));
  }
}

inline void write_magic(std::ostream& out, const char (&magic)[9]) { out.write(magic, 8); }

inline void expect_magic(std::istream& in, const char (&magic)[9],
                         const std::filesystem::path& path) {
  char got[8]{};
  if (!in.read(got, 8) || std::string(got, 8) != std::string(magic, 8)) {
    throw IngestError(path.string() + ": bad magic at byte offset 0, expected " +
                      std::string(magic, 8));
  }
}

}  // namespace qrc::detail
