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

#include <cstdint>
#include <string>
#include <vector>

#include "armaseg/io.hpp"

namespace armaseg {

/// Provenance of a predicted mask.
struct MaskMeta {
  double tau = 0.0;
  std::uint64_t seed = 0;
  int epochs = 0;
  std::string activation;
  std::string foreground_rule;
  int foreground_cluster = -1;
  bool trivial_partition = false;
  bool refined = false;
};

/// Full-resolution binary mask, 1 = foreground.
struct SegMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // row-major, values 0/1
  MaskMeta meta;

  SegMask() = default;
  SegMask(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t at(int row, int col) const {
    return bits[static_cast<std::size_t>(row) * width + col];
  }
  std::uint8_t& at(int row, int col) {
    return bits[static_cast<std::size_t>(row) * width + col];
  }
  std::size_t foreground_count() const;

  /// 255 for foreground, 0 for background.
  GrayImage to_image() const;
  /// Pixels > 127 are foreground.
  static SegMask from_image(const GrayImage& image);
};

/// Writes the mask as binary PGM (foreground 255, background 0).
void write_mask_pgm(const std::string& path, const SegMask& mask);
/// Reads a PGM or PNG ground-truth mask.
SegMask read_mask(const std::string& path);

}  // namespace armaseg
