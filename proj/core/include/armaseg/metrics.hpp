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
#include <span>
#include <vector>

#include "armaseg/mask.hpp"

namespace armaseg {

/// Pixel confusion counts and intersection-over-union per class.
struct IoUBreakdown {
  std::vector<double> per_class;  // NaN for classes absent from both masks
  std::vector<std::int64_t> tp;
  std::vector<std::int64_t> fp;
  std::vector<std::int64_t> fn;
  double miou = 0.0;             // mean over classes present in either mask

  bool present(std::size_t cls) const { return tp[cls] + fp[cls] + fn[cls] > 0; }
};

/// Per-class IoU of two label maps with values in [0, n_classes).
IoUBreakdown iou(std::span<const std::uint8_t> pred,
                 std::span<const std::uint8_t> truth, int n_classes);

/// Binary masks; class 0 = background, class 1 = foreground.
/// Throws ShapeError when the dimensions differ.
IoUBreakdown iou(const SegMask& pred, const SegMask& truth, int n_classes = 2);

/// Diagnostic only: the better mIoU of the mask and its complement.
double oracle_flip_miou(const SegMask& pred, const SegMask& truth);

/// Chance-corrected agreement between two clusterings of the same items.
/// Returns 1 when both clusterings are trivial in the same way.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace armaseg
