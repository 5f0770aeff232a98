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

#include <cmath>
#include <fstream>
#include <iterator>

#include "armaseg/errors.hpp"
#include "armaseg/io.hpp"
#include "binary_io.hpp"

namespace armaseg {

namespace {

constexpr char kUfvMagic[4] = {'U', 'F', 'V', '1'};
constexpr std::size_t kUfvHeaderBytes = 4 + 4 * 4;

}  // namespace

FeatureMatrix read_ufv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError(path, "cannot open feature file");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 4 ||
      std::string(bytes.begin(), bytes.begin() + 4) != std::string(kUfvMagic, 4)) {
    throw FormatError(path, "bad magic (expected UFV1)");
  }
  if (bytes.size() < kUfvHeaderBytes) throw FormatError(path, "truncated header");
  auto u32 = [&](std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
    }
    return v;
  };
  const std::uint64_t n = u32(4);
  const std::uint64_t c_in = u32(8);
  const std::uint64_t grid_rows = u32(12);
  const std::uint64_t grid_cols = u32(16);
  if (n == 0 || c_in == 0) throw FormatError(path, "empty feature matrix");
  if (grid_rows * grid_cols != n) {
    throw FormatError(path, "grid " + std::to_string(grid_rows) + "x" +
                                std::to_string(grid_cols) + " does not hold n = " +
                                std::to_string(n) + " patches");
  }
  const std::uint64_t expected = kUfvHeaderBytes + 4 * n * c_in;
  if (bytes.size() != expected) {
    throw FormatError(path, "payload length mismatch: expected " +
                                std::to_string(expected) + " bytes, found " +
                                std::to_string(bytes.size()));
  }

  FeatureMatrix f;
  f.grid_rows = static_cast<int>(grid_rows);
  f.grid_cols = static_cast<int>(grid_cols);
  f.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c_in));
  const unsigned char* p = bytes.data() + kUfvHeaderBytes;
  for (Eigen::Index i = 0; i < f.values.size(); ++i, p += 4) {
    f.values.data()[i] = static_cast<double>(detail::f32_from_le(p));
  }
  try {
    f.validate();
  } catch (const Error& e) {
    throw FormatError(path, e.what());
  }
  return f;
}

void write_ufv(const std::string& path, const FeatureMatrix& f) {
  if (static_cast<Eigen::Index>(f.grid_rows) * f.grid_cols != f.n()) {
    throw ShapeError("write_ufv: grid does not match the row count");
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError(path, "cannot open for writing");
  os.write(kUfvMagic, 4);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.n()));
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.c_in()));
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid_rows));
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid_cols));
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    detail::put_f32(os, static_cast<float>(f.values.data()[i]));
  }
  if (!os) throw FormatError(path, "write failed");
}

}  // namespace armaseg
