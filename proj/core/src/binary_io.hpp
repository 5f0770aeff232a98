// Copyright 2026 The armaseg Authors.
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

// Little-endian primitive encoding shared by the binary file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "armaseg/errors.hpp"

namespace armaseg::detail {

template <typename UInt>
void put_le(std::ostream& os, UInt v) {
  char buf[sizeof(UInt)];
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  }
  os.write(buf, sizeof(UInt));
}

template <typename UInt>
UInt get_le(std::istream& is, const std::string& path, const char* what) {
  unsigned char buf[sizeof(UInt)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(UInt))) {
    throw FormatError(path, std::string("truncated while reading ") + what);
  }
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    v |= static_cast<UInt>(buf[i]) << (8 * i);
  }
  return v;
}

inline void put_f32(std::ostream& os, float f) {
  put_le<std::uint32_t>(os, std::bit_cast<std::uint32_t>(f));
}
inline void put_f64(std::ostream& os, double d) {
  put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(d));
}

inline float f32_from_le(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return std::bit_cast<float>(v);
}

inline double get_f64(std::istream& is, const std::string& path,
                      const char* what) {
  return std::bit_cast<double>(get_le<std::uint64_t>(is, path, what));
}

}  // namespace armaseg::detail
