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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "armaseg/arma_net.hpp"
#include "armaseg/graph.hpp"
#include "armaseg/mask.hpp"
#include "armaseg/metrics.hpp"
#include "armaseg/optim.hpp"

namespace armaseg {

/// Every knob of a segmentation run.
struct SegConfig {
  GraphOptions graph;
  ArmaConfig net;
  OptimConfig optim;
  int clusters = 2;
  int patch = 8;
  bool refine = true;
  bool soft_upsample = false;
  bool losscurve = false;
  int threads = 1;

  void validate() const;
};

struct SegJob {
  std::string features_path;
  /// Original image size; 0 means grid size times the patch size.
  int height = 0;
  int width = 0;
  std::optional<std::string> gt_path;
  SegConfig config;

  /// File name of the feature file without directory and extension.
  std::string stem() const;
};

struct SegResult {
  SegMask mask;
  std::vector<int> labels;  // patch-level cluster index
  double modularity = 0.0;  // hard modularity of `labels`
  Matrix assignment;        // n x k soft assignment
  std::vector<LossReport> history;
  std::optional<IoUBreakdown> iou;
  std::optional<double> oracle_flip_miou;
  double seconds = 0.0;
  ArmaModel model;
};

/// Patch labels (0/1) painted onto a height x width mask. Each pixel takes
/// the label of the patch whose centre is nearest, which reduces to p x p
/// block painting when the size is an exact multiple of the patch size.
SegMask assemble_mask(std::span<const int> labels, int grid_rows, int grid_cols,
                      int height, int width, int patch);

/// Picks the foreground cluster of a two-cluster labelling: the cluster
/// holding fewer border patches; then the smaller cluster; then cluster 1.
int select_foreground(std::span<const int> labels, int grid_rows, int grid_cols);

/// One pass of a 3x3 majority filter; neighbourhoods are clipped at the
/// image border and exact ties keep the current value.
SegMask refine_mask(const SegMask& mask);

/// Bilinear upsampling of the soft assignment followed by a per-pixel
/// argmax; pixels whose argmax is `foreground` become 1.
SegMask soft_upsample_mask(const Matrix& assignment, int grid_rows,
                           int grid_cols, int height, int width, int foreground);

/// Runs the whole per-image flow on in-memory features. A learned partition
/// with negative modularity is replaced by the single-cluster partition
/// (modularity 0) and flagged as trivial.
SegResult segment_features(const FeatureMatrix& features, int height, int width,
                           const SegConfig& cfg);

/// Loads the job's feature file (and ground truth, when given) and runs it.
/// An edgeless graph becomes a JobError suggesting a lower tau.
SegResult run_image(const SegJob& job);

/// "epoch,total,modularity_term,regularizer" rows at full precision.
std::string loss_csv(const std::vector<LossReport>& history);

/// JSON sidecar text: config echo, loss summary, IoU values, timing.
std::string sidecar_json(const SegJob& job, const SegResult& result);

/// Writes <stem>.mask.pgm, <stem>.json and, if requested, <stem>.loss.csv.
void write_outputs(const SegJob& job, const SegResult& result,
                   const std::string& out_dir);

}  // namespace armaseg
