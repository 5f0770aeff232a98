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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "armaseg/errors.hpp"
#include "oracles.hpp"

namespace armaseg {
namespace {

SegMask left_half(int w, int h) {
  SegMask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w / 2; ++x) m.at(y, x) = 1;
  }
  return m;
}

SegMask random_mask(int w, int h, std::mt19937_64& rng) {
  SegMask m(w, h);
  for (auto& b : m.bits) b = static_cast<std::uint8_t>(rng() % 2);
  return m;
}

TEST(Iou, PerfectPrediction) {
  const SegMask gt = left_half(8, 6);
  const IoUBreakdown r = iou(gt, gt);
  EXPECT_EQ(r.per_class[0], 1.0);
  EXPECT_EQ(r.per_class[1], 1.0);
  EXPECT_EQ(r.miou, 1.0);
}

TEST(Iou, AllForegroundAgainstLeftHalf) {
  const IoUBreakdown r = iou(SegMask(8, 6, 1), left_half(8, 6));
  EXPECT_EQ(r.per_class[1], 0.5);
  EXPECT_EQ(r.per_class[0], 0.0);
  EXPECT_EQ(r.miou, 0.25);
  EXPECT_EQ(r.tp[1], 24);
  EXPECT_EQ(r.fp[1], 24);
  EXPECT_EQ(r.fn[0], 24);
}

TEST(Iou, ComplementScoresZero) {
  const SegMask gt = left_half(8, 6);
  SegMask pred = gt;
  for (auto& b : pred.bits) b = 1 - b;
  const IoUBreakdown r = iou(pred, gt);
  EXPECT_EQ(r.per_class[0], 0.0);
  EXPECT_EQ(r.per_class[1], 0.0);
  EXPECT_EQ(r.miou, 0.0);
  EXPECT_EQ(oracle_flip_miou(pred, gt), 1.0);
}

TEST(Iou, AbsentClassExcludedFromMean) {
  const IoUBreakdown r = iou(SegMask(4, 4, 0), SegMask(4, 4, 0));
  EXPECT_TRUE(std::isnan(r.per_class[1]));
  EXPECT_FALSE(r.present(1));
  EXPECT_EQ(r.miou, 1.0);
}

TEST(Iou, DimensionMismatchIsShapeError) {
  EXPECT_THROW(iou(SegMask(4, 4), SegMask(4, 5)), ShapeError);
}

TEST(Iou, SwappingArgumentsSwapsErrorsOnly) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const SegMask a = random_mask(9, 7, rng);
    const SegMask b = random_mask(9, 7, rng);
    const IoUBreakdown ab = iou(a, b);
    const IoUBreakdown ba = iou(b, a);
    for (int c = 0; c < 2; ++c) {
      EXPECT_EQ(ab.fp[c], ba.fn[c]);
      EXPECT_EQ(ab.fn[c], ba.fp[c]);
      EXPECT_EQ(ab.per_class[c], ba.per_class[c]);
    }
    EXPECT_GE(ab.miou, 0.0);
    EXPECT_LE(ab.miou, 1.0);
    EXPECT_EQ(ab.miou == 1.0, a.bits == b.bits);
  }
}

TEST(Iou, MultiClassLabelMaps) {
  const std::vector<std::uint8_t> pred = {0, 1, 2, 2, 1, 0};
  const std::vector<std::uint8_t> truth = {0, 1, 2, 1, 1, 2};
  const IoUBreakdown r = iou(pred, truth, 4);
  EXPECT_DOUBLE_EQ(r.per_class[0], 1.0 / 2.0);
  EXPECT_DOUBLE_EQ(r.per_class[1], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.per_class[2], 1.0 / 3.0);
  EXPECT_TRUE(std::isnan(r.per_class[3]));
  EXPECT_DOUBLE_EQ(r.miou, (0.5 + 2.0 / 3.0 + 1.0 / 3.0) / 3.0);
  EXPECT_THROW(iou(pred, truth, 2), ContractError);
}

TEST(AdjustedRandIndex, IdenticalUpToRelabelingIsOne) {
  const std::vector<int> a = {0, 0, 1, 1, 2, 2};
  const std::vector<int> b = {5, 5, 3, 3, 9, 9};
  EXPECT_NEAR(adjusted_rand_index(a, b), 1.0, 1e-15);
}

TEST(AdjustedRandIndex, MatchesPairCountingOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 5 + trial;
    std::vector<int> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng() % 3);
      b[i] = trial % 2 == 0 ? a[i] ^ static_cast<int>(rng() % 4 == 0) : static_cast<int>(rng() % 2);
    }
    EXPECT_NEAR(adjusted_rand_index(a, b), testing::pair_counting_ari(a, b), 1e-12);
  }
}

TEST(AdjustedRandIndex, SizeMismatchIsShapeError) {
  EXPECT_THROW(adjusted_rand_index(std::vector<int>{0, 1}, std::vector<int>{0}), ShapeError);
}

}  // namespace
}  // namespace armaseg
