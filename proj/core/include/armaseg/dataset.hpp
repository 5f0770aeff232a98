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

// Directory-level evaluation: pairs feature files with ground-truth masks by
// file stem, runs every pair and aggregates per-image mIoU.

#include <optional>
#include <string>
#include <vector>

#include "armaseg/metrics.hpp"
#include "armaseg/pipeline.hpp"

namespace armaseg {

struct ImageReport {
  std::string stem;
  std::string features_path;
  std::string gt_path;
  IoUBreakdown iou;
  double oracle_flip_miou = 0.0;  // diagnostic
  bool trivial_partition = false;
  std::size_t foreground_pixels = 0;
  double seconds = 0.0;
};

struct FailedJob {
  std::string stem;
  std::string message;
};

struct DatasetReport {
  std::vector<ImageReport> images;  // sorted by stem
  double mean_miou = 0.0;           // mean of per-image mIoU
  double mean_oracle_flip_miou = 0.0;
  std::string config_fingerprint;
  double total_seconds = 0.0;
  double mean_seconds = 0.0;
  double min_seconds = 0.0;
  double max_seconds = 0.0;
  std::vector<std::string> unmatched;  // files with no partner, sorted
  std::vector<FailedJob> failed;       // jobs that threw, sorted by stem

  std::size_t warning_count() const { return unmatched.size() + failed.size(); }
};

/// Runs the jobs on cfg.threads worker threads. A job that throws is
/// recorded in `failed`; the result does not depend on job order. When
/// `mask_dir` is set each job's outputs are written there.
DatasetReport evaluate_jobs(std::vector<SegJob> jobs, const SegConfig& cfg,
                            const std::optional<std::string>& mask_dir = std::nullopt);

/// Pairs <features_dir>/<stem>.ufv with <gt_dir>/<stem>.{pgm,png}. The mask
/// size comes from the ground truth. No pair at all throws JobError
/// "no jobs found".
DatasetReport evaluate_dataset(const std::string& features_dir,
                               const std::string& gt_dir, const SegConfig& cfg,
                               const std::optional<std::string>& mask_dir = std::nullopt);

/// Timing fields are omitted when include_timing is false, which makes the
/// text a pure function of the inputs and config.
std::string report_json(const DatasetReport& report, bool include_timing = true);
/// One row per image: stem,miou,iou_bg,iou_fg,oracle_flip_miou,trivial,seconds
std::string report_csv(const DatasetReport& report, bool include_timing = true);

/// Writes report.json and report.csv into out_dir.
void write_report(const DatasetReport& report, const std::string& out_dir);

}  // namespace armaseg
