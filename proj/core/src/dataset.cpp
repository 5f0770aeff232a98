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

#include "armaseg/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "armaseg/config.hpp"
#include "armaseg/errors.hpp"
#include "armaseg/io.hpp"

namespace armaseg {

namespace fs = std::filesystem;

DatasetReport evaluate_jobs(std::vector<SegJob> jobs, const SegConfig& cfg,
                            const std::optional<std::string>& mask_dir) {
  cfg.validate();
  if (jobs.empty()) throw JobError("no jobs found");
  std::sort(jobs.begin(), jobs.end(), [](const SegJob& a, const SegJob& b) {
    return a.stem() < b.stem();
  });

  DatasetReport report;
  report.config_fingerprint = fingerprint(cfg);
  std::mutex mu;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      SegJob job = jobs[i];
      job.config = cfg;
      try {
        const SegResult r = run_image(job);
        if (mask_dir) write_outputs(job, r, *mask_dir);
        ImageReport entry;
        entry.stem = job.stem();
        entry.features_path = job.features_path;
        entry.gt_path = job.gt_path.value_or("");
        if (r.iou) entry.iou = *r.iou;
        entry.oracle_flip_miou = r.oracle_flip_miou.value_or(0.0);
        entry.trivial_partition = r.mask.meta.trivial_partition;
        entry.foreground_pixels = r.mask.foreground_count();
        entry.seconds = r.seconds;
        std::lock_guard lock(mu);
        report.images.push_back(std::move(entry));
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        report.failed.push_back({job.stem(), e.what()});
      }
    }
  };

  const int n_threads =
      static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), jobs.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::sort(report.images.begin(), report.images.end(),
            [](const ImageReport& a, const ImageReport& b) { return a.stem < b.stem; });
  std::sort(report.failed.begin(), report.failed.end(),
            [](const FailedJob& a, const FailedJob& b) { return a.stem < b.stem; });

  if (!report.images.empty()) {
    double miou = 0.0;
    double flip = 0.0;
    report.min_seconds = report.images.front().seconds;
    for (const ImageReport& e : report.images) {
      miou += e.iou.miou;
      flip += e.oracle_flip_miou;
      report.total_seconds += e.seconds;
      report.min_seconds = std::min(report.min_seconds, e.seconds);
      report.max_seconds = std::max(report.max_seconds, e.seconds);
    }
    const double count = static_cast<double>(report.images.size());
    report.mean_miou = miou / count;
    report.mean_oracle_flip_miou = flip / count;
    report.mean_seconds = report.total_seconds / count;
  }
  return report;
}

DatasetReport evaluate_dataset(const std::string& features_dir,
                               const std::string& gt_dir, const SegConfig& cfg,
                               const std::optional<std::string>& mask_dir) {
  if (!fs::is_directory(features_dir)) {
    throw JobError(features_dir + ": not a directory");
  }
  if (!fs::is_directory(gt_dir)) throw JobError(gt_dir + ": not a directory");

  std::map<std::string, std::string> features;
  for (const auto& e : fs::directory_iterator(features_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".ufv") {
      features[e.path().stem().string()] = e.path().string();
    }
  }
  std::map<std::string, std::string> truths;
  for (const auto& e : fs::directory_iterator(gt_dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".pgm" || ext == ".png")) {
      const std::string stem = e.path().stem().string();
      // A stem present as both .pgm and .png resolves to .pgm.
      if (!truths.count(stem) || ext == ".pgm") truths[stem] = e.path().string();
    }
  }

  std::vector<SegJob> jobs;
  std::vector<std::string> unmatched;
  for (const auto& [stem, path] : features) {
    const auto it = truths.find(stem);
    if (it == truths.end()) {
      unmatched.push_back(path);
      continue;
    }
    const GrayImage gt = read_gray_image(it->second);
    SegJob job;
    job.features_path = path;
    job.gt_path = it->second;
    job.height = gt.height;
    job.width = gt.width;
    jobs.push_back(std::move(job));
  }
  for (const auto& [stem, path] : truths) {
    if (!features.count(stem)) unmatched.push_back(path);
  }
  if (jobs.empty()) {
    throw JobError("no jobs found (features: " + features_dir + ", gt: " + gt_dir + ")");
  }
  DatasetReport report = evaluate_jobs(std::move(jobs), cfg, mask_dir);
  std::sort(unmatched.begin(), unmatched.end());
  report.unmatched = std::move(unmatched);
  return report;
}

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json nan_to_null(double v) {
  return std::isnan(v) ? nlohmann::json() : nlohmann::json(v);
}

}  // namespace

std::string report_json(const DatasetReport& report, bool include_timing) {
  nlohmann::json j;
  j["config_fingerprint"] = report.config_fingerprint;
  j["images_evaluated"] = report.images.size();
  j["mean_miou"] = report.mean_miou;
  j["mean_oracle_flip_miou_diagnostic"] = report.mean_oracle_flip_miou;
  nlohmann::json images = nlohmann::json::array();
  for (const ImageReport& e : report.images) {
    nlohmann::json ij;
    ij["stem"] = e.stem;
    ij["features"] = e.features_path;
    ij["ground_truth"] = e.gt_path;
    ij["miou"] = e.iou.miou;
    nlohmann::json per = nlohmann::json::array();
    for (double v : e.iou.per_class) per.push_back(nan_to_null(v));
    ij["per_class_iou"] = per;
    ij["tp"] = e.iou.tp;
    ij["fp"] = e.iou.fp;
    ij["fn"] = e.iou.fn;
    ij["oracle_flip_miou_diagnostic"] = e.oracle_flip_miou;
    ij["trivial_partition"] = e.trivial_partition;
    ij["foreground_pixels"] = e.foreground_pixels;
    if (include_timing) ij["seconds"] = e.seconds;
    images.push_back(ij);
  }
  j["images"] = images;
  if (include_timing) {
    j["timing"] = {{"total_seconds", report.total_seconds},
                   {"mean_seconds", report.mean_seconds},
                   {"min_seconds", report.min_seconds},
                   {"max_seconds", report.max_seconds}};
  }
  j["warnings"] = report.warning_count();
  j["unmatched"] = report.unmatched;
  nlohmann::json failed = nlohmann::json::array();
  for (const FailedJob& f : report.failed) {
    failed.push_back({{"stem", f.stem}, {"error", f.message}});
  }
  j["failed"] = failed;
  return j.dump(2) + "\n";
}

std::string report_csv(const DatasetReport& report, bool include_timing) {
  std::ostringstream os;
  os << "stem,miou,iou_bg,iou_fg,oracle_flip_miou,trivial";
  if (include_timing) os << ",seconds";
  os << '\n';
  for (const ImageReport& e : report.images) {
    const auto cls = [&](std::size_t c) {
      return c < e.iou.per_class.size() ? format_double(e.iou.per_class[c])
                                        : std::string("nan");
    };
    os << e.stem << ',' << format_double(e.iou.miou) << ',' << cls(0) << ','
       << cls(1) << ',' << format_double(e.oracle_flip_miou) << ','
       << (e.trivial_partition ? 1 : 0);
    if (include_timing) os << ',' << format_double(e.seconds);
    os << '\n';
  }
  return os.str();
}

void write_report(const DatasetReport& report, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const auto put = [&](const std::string& name, const std::string& text) {
    const std::string path = (fs::path(out_dir) / name).string();
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError(path, "cannot open for writing");
    os << text;
  };
  put("report.json", report_json(report));
  put("report.csv", report_csv(report));
}

}  // namespace armaseg
