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

#include "armaseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "armaseg/errors.hpp"

namespace armaseg {

std::size_t SegMask::foreground_count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
}

GrayImage SegMask::to_image() const {
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(bits.size());
  std::transform(bits.begin(), bits.end(), img.pixels.begin(),
                 [](std::uint8_t b) -> std::uint8_t { return b ? 255 : 0; });
  return img;
}

SegMask SegMask::from_image(const GrayImage& image) {
  SegMask m(image.width, image.height);
  std::transform(image.pixels.begin(), image.pixels.end(), m.bits.begin(),
                 [](std::uint8_t v) -> std::uint8_t { return v > 127 ? 1 : 0; });
  return m;
}

void write_mask_pgm(const std::string& path, const SegMask& mask) {
  write_pgm(path, mask.to_image());
}

SegMask read_mask(const std::string& path) {
  return SegMask::from_image(read_gray_image(path));
}

IoUBreakdown iou(std::span<const std::uint8_t> pred,
                 std::span<const std::uint8_t> truth, int n_classes) {
  if (pred.size() != truth.size()) {
    throw ShapeError("iou: prediction has " + std::to_string(pred.size()) +
                     " pixels, ground truth has " + std::to_string(truth.size()));
  }
  if (n_classes < 1) throw ConfigError("iou: n_classes must be >= 1");
  const auto k = static_cast<std::size_t>(n_classes);
  IoUBreakdown out;
  out.tp.assign(k, 0);
  out.fp.assign(k, 0);
  out.fn.assign(k, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const std::size_t p = pred[i];
    const std::size_t t = truth[i];
    if (p >= k || t >= k) throw ContractError("iou: label outside [0, n_classes)");
    if (p == t) {
      ++out.tp[p];
    } else {
      ++out.fp[p];
      ++out.fn[t];
    }
  }
  out.per_class.assign(k, std::numeric_limits<double>::quiet_NaN());
  double total = 0.0;
  int counted = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const std::int64_t denom = out.tp[c] + out.fp[c] + out.fn[c];
    if (denom == 0) continue;
    out.per_class[c] = static_cast<double>(out.tp[c]) / static_cast<double>(denom);
    total += out.per_class[c];
    ++counted;
  }
  out.miou = counted > 0 ? total / counted : 0.0;
  return out;
}

IoUBreakdown iou(const SegMask& pred, const SegMask& truth, int n_classes) {
  if (pred.width != truth.width || pred.height != truth.height) {
    throw ShapeError("iou: mask sizes differ (" + std::to_string(pred.width) +
                     "x" + std::to_string(pred.height) + " vs " +
                     std::to_string(truth.width) + "x" +
                     std::to_string(truth.height) + ")");
  }
  return iou(std::span<const std::uint8_t>(pred.bits),
             std::span<const std::uint8_t>(truth.bits), n_classes);
}

double oracle_flip_miou(const SegMask& pred, const SegMask& truth) {
  SegMask flipped = pred;
  for (auto& b : flipped.bits) b = b ? 0 : 1;
  return std::max(iou(pred, truth).miou, iou(flipped, truth).miou);
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw ShapeError("adjusted_rand_index: clusterings have different sizes");
  }
  const auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [key, count] : joint) index += pairs(count);
  double sum_rows = 0.0;
  for (const auto& [key, count] : rows) sum_rows += pairs(count);
  double sum_cols = 0.0;
  for (const auto& [key, count] : cols) sum_cols += pairs(count);
  const double total = pairs(static_cast<double>(a.size()));
  if (total == 0.0) return 1.0;
  const double expected = sum_rows * sum_cols / total;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace armaseg
