// Copyright (c) 2026 The clstx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

// Little-endian scalar encoding shared by the on-disk formats.
namespace clstx::detail {

template <typename U>
void put_le(std::vector<char>& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

inline void put_f32(std::vector<char>& out, float value) {
  put_le(out, std::bit_cast<std::uint32_t>(value));
}

template <typename U>
U get_le(const unsigned char* bytes) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return static_cast<U>(v);
}

inline float get_f32(const unsigned char* bytes) {
  return std::bit_cast<float>(get_le<std::uint32_t>(bytes));
}

/// Bulk f32 conversion; memcpy on little-endian hosts.
inline void decode_f32(const unsigned char* bytes, std::span<float> out) {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out.data(), bytes, out.size() * sizeof(float));
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = get_f32(bytes + 4 * i);
  }
}

inline void encode_f32(std::span<const float> values, std::vector<char>& out) {
  if constexpr (std::endian::native == std::endian::little) {
    const auto* p = reinterpret_cast<const char*>(values.data());
    out.insert(out.end(), p, p + values.size() * sizeof(float));
  } else {
    for (float v : values) put_f32(out, v);
  }
}

}  // namespace clstx::detail
