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

// File formats: UFV1 feature files and 8-bit grayscale images (PGM, PNG).

#include <cstdint>
#include <string>
#include <vector>

#include "armaseg/graph.hpp"

namespace armaseg {

/// UFV1 layout: magic "UFV1", little-endian u32 n, c_in, grid_rows,
/// grid_cols, then n * c_in little-endian float32 values, row-major with
/// patches in row-major grid order.
///
/// Reading widens to double and validates the header, the exact payload
/// length, finiteness and non-zero row norms; failures throw FormatError
/// naming the path.
FeatureMatrix read_ufv(const std::string& path);

/// Values are narrowed to float32.
void write_ufv(const std::string& path, const FeatureMatrix& f);

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, width * height

  std::uint8_t at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }
};

/// Binary (P5) or ASCII (P2) PGM. 16-bit samples are scaled to 8 bits.
GrayImage read_pgm(const std::string& path);
/// Always writes binary P5 with maxval 255: "P5\n<w> <h>\n255\n" + pixels.
void write_pgm(const std::string& path, const GrayImage& image);

/// 8-bit PNG; colour input is converted to gray, alpha is dropped.
GrayImage read_png(const std::string& path);

/// Dispatches on the file signature (PGM or PNG).
GrayImage read_gray_image(const std::string& path);

}  // namespace armaseg
