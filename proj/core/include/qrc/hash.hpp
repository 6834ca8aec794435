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

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>

namespace qrc {

// 64-bit FNV-1a. Used for cache keys and provenance hashes, not for security.
class Fnv1a {
 public:
  Fnv1a& bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }

  template <typename T>
    requires std::is_trivially_copyable_v<T>
  Fnv1a& value(const T& v) {
    return bytes(&v, sizeof(T));
  }

  template <typename T>
    requires std::is_trivially_copyable_v<T>
  Fnv1a& values(std::span<const T> v) {
    return bytes(v.data(), v.size_bytes());
  }

  Fnv1a& text(std::string_view s) {
    value(s.size());
    return bytes(s.data(), s.size());
  }

  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string hex_digest(std::uint64_t h);

}  // namespace qrc
