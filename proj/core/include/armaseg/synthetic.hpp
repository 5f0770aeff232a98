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

// Seeded generators for benchmarks with a known answer.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "armaseg/graph.hpp"
#include "armaseg/mask.hpp"

namespace armaseg {

/// A centred square of foreground patches on a background grid. Foreground
/// rows are drawn around one unit prototype, background rows around a
/// second one at angle theta_deg, with i.i.d. Gaussian noise per coordinate.
struct BlobParams {
  int grid = 28;
  int side = 20;  // blob side length in patches; ~half the grid area
  int dims = 16;
  double theta_deg = 60.0;
  double sigma = 0.15;
  int patch = 8;

  /// Throws ConfigError.
  void validate() const;
};

struct BlobSample {
  FeatureMatrix features;
  std::vector<int> patch_labels;  // 1 inside the blob
  SegMask truth;                  // grid*patch pixels square
};

BlobSample generate_blob(const BlobParams& params, std::uint64_t seed);

/// Stochastic block model with noisy one-hot block indicators as features.
struct SbmParams {
  int blocks = 2;
  int block_size = 20;
  double p_in = 0.9;
  double p_out = 0.05;
  double sigma = 0.1;

  /// Throws ConfigError.
  void validate() const;
};

struct SbmSample {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // i < j
  FeatureMatrix features;                  // n x blocks on a 1 x n grid
  std::vector<int> labels;                 // block index per node
};

SbmSample generate_sbm(const SbmParams& params, std::uint64_t seed);

/// Writes <out>/features/<stem>.ufv and <out>/gt/<stem>.pgm.
void write_blob(const BlobSample& sample, const std::string& out_dir,
                const std::string& stem);

/// Writes <out>/features/<stem>.ufv, <out>/graph/<stem>.edges ("i j" per
/// line) and <out>/gt/<stem>.labels (one block index per line).
void write_sbm(const SbmSample& sample, const std::string& out_dir,
               const std::string& stem);

}  // namespace armaseg
