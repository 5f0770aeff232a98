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

#include "armaseg/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "armaseg/config.hpp"
#include "armaseg/errors.hpp"
#include "armaseg/io.hpp"
#include "armaseg/objective.hpp"

namespace armaseg {

void SegConfig::validate() const {
  if (!(graph.tau > 0.0 && graph.tau < 1.0)) {
    throw ConfigError("tau must lie in (0, 1), got " + std::to_string(graph.tau));
  }
  net.validate();
  optim.validate();
  if (clusters < 2) throw ConfigError("clusters must be >= 2");
  if (patch < 1) throw ConfigError("patch size must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

std::string SegJob::stem() const {
  return std::filesystem::path(features_path).stem().string();
}

// ---------------------------------------------------------------------------
// Mask assembly

namespace {

void require_grid(std::span<const int> labels, int grid_rows, int grid_cols) {
  if (grid_rows < 1 || grid_cols < 1 ||
      labels.size() != static_cast<std::size_t>(grid_rows) * grid_cols) {
    throw ShapeError("label count " + std::to_string(labels.size()) +
                     " does not match a " + std::to_string(grid_rows) + "x" +
                     std::to_string(grid_cols) + " grid");
  }
}

// Index of the patch whose centre is nearest to pixel `x` of `extent` pixels
// spread over `cells` patches.
int nearest_cell(int x, int extent, int cells) {
  const std::int64_t j =
      (static_cast<std::int64_t>(2 * x + 1) * cells) / (2 * static_cast<std::int64_t>(extent));
  return static_cast<int>(std::min<std::int64_t>(j, cells - 1));
}

}  // namespace

SegMask assemble_mask(std::span<const int> labels, int grid_rows, int grid_cols,
                      int height, int width, int patch) {
  require_grid(labels, grid_rows, grid_cols);
  if (height < 1 || width < 1 || patch < 1) {
    throw ShapeError("assemble_mask: output size and patch must be positive");
  }
  for (int l : labels) {
    if (l != 0 && l != 1) throw ContractError("assemble_mask: labels must be 0/1");
  }
  SegMask mask(width, height);
  const bool exact = height == grid_rows * patch && width == grid_cols * patch;
  for (int y = 0; y < height; ++y) {
    const int gy = exact ? y / patch : nearest_cell(y, height, grid_rows);
    for (int x = 0; x < width; ++x) {
      const int gx = exact ? x / patch : nearest_cell(x, width, grid_cols);
      mask.at(y, x) =
          static_cast<std::uint8_t>(labels[static_cast<std::size_t>(gy) * grid_cols + gx]);
    }
  }
  return mask;
}

int select_foreground(std::span<const int> labels, int grid_rows, int grid_cols) {
  require_grid(labels, grid_rows, grid_cols);
  std::int64_t border[2] = {0, 0};
  std::int64_t size[2] = {0, 0};
  for (int r = 0; r < grid_rows; ++r) {
    for (int c = 0; c < grid_cols; ++c) {
      const int l = labels[static_cast<std::size_t>(r) * grid_cols + c];
      if (l != 0 && l != 1) {
        throw ContractError("select_foreground needs exactly two clusters");
      }
      ++size[l];
      if (r == 0 || c == 0 || r == grid_rows - 1 || c == grid_cols - 1) {
        ++border[l];
      }
    }
  }
  if (border[0] != border[1]) return border[0] < border[1] ? 0 : 1;
  if (size[0] != size[1]) return size[0] < size[1] ? 0 : 1;
  return 1;
}

SegMask refine_mask(const SegMask& mask) {
  SegMask out = mask;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      int ones = 0;
      int total = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= mask.height) continue;
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = x + dx;
          if (xx < 0 || xx >= mask.width) continue;
          ones += mask.at(yy, xx);
          ++total;
        }
      }
      if (2 * ones > total) {
        out.at(y, x) = 1;
      } else if (2 * ones < total) {
        out.at(y, x) = 0;
      }
    }
  }
  out.meta.refined = true;
  return out;
}

SegMask soft_upsample_mask(const Matrix& assignment, int grid_rows,
                           int grid_cols, int height, int width, int foreground) {
  if (assignment.rows() != static_cast<Eigen::Index>(grid_rows) * grid_cols) {
    throw ShapeError("soft_upsample_mask: assignment rows do not match the grid");
  }
  if (height < 1 || width < 1) throw ShapeError("soft_upsample_mask: empty output");
  const Eigen::Index k = assignment.cols();
  // Sample position in patch-centre coordinates, clamped to the grid.
  auto coord = [](int px, int extent, int cells, int& i0, int& i1, double& w) {
    double u = (px + 0.5) * cells / extent - 0.5;
    u = std::clamp(u, 0.0, static_cast<double>(cells - 1));
    i0 = static_cast<int>(std::floor(u));
    i1 = std::min(i0 + 1, cells - 1);
    w = u - i0;
  };
  SegMask mask(width, height);
  Eigen::RowVectorXd p(k);
  for (int y = 0; y < height; ++y) {
    int r0, r1;
    double wy;
    coord(y, height, grid_rows, r0, r1, wy);
    for (int x = 0; x < width; ++x) {
      int c0, c1;
      double wx;
      coord(x, width, grid_cols, c0, c1, wx);
      auto row = [&](int r, int c) {
        return assignment.row(static_cast<Eigen::Index>(r) * grid_cols + c);
      };
      p = (1 - wy) * ((1 - wx) * row(r0, c0) + wx * row(r0, c1)) +
          wy * ((1 - wx) * row(r1, c0) + wx * row(r1, c1));
      Eigen::Index best = 0;
      for (Eigen::Index j = 1; j < k; ++j) {
        if (p(j) > p(best)) best = j;
      }
      mask.at(y, x) = best == foreground ? 1 : 0;
    }
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Per-image flow

SegResult segment_features(const FeatureMatrix& features, int height, int width,
                           const SegConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  features.validate();
  if (height == 0) height = features.grid_rows * cfg.patch;
  if (width == 0) width = features.grid_cols * cfg.patch;

  const FeatureMatrix normalized = row_normalize(features);
  const PatchGraph graph = build_adjacency(normalized, cfg.graph);
  const ModularityMatrix b = modularity_matrix(graph);

  SegResult result;
  result.model = init_model(cfg.net, static_cast<int>(normalized.c_in()),
                            cfg.clusters, cfg.optim.seed);
  TrainResult trained = train(result.model, graph, b, normalized.values, cfg.optim);
  result.assignment = std::move(trained.assignment);
  result.history = std::move(trained.history);
  result.labels = hard_labels(result.assignment);
  result.modularity = hard_modularity(graph, result.labels);
  const bool fallback = result.modularity < 0.0;
  if (fallback) {
    std::fill(result.labels.begin(), result.labels.end(), 0);
    result.modularity = 0.0;
  }

  const bool trivial =
      std::all_of(result.labels.begin(), result.labels.end(),
                  [&](int l) { return l == result.labels.front(); });

  int fg = 1;
  std::vector<int> patch_bits(result.labels.size());
  if (cfg.clusters == 2) {
    fg = select_foreground(result.labels, features.grid_rows, features.grid_cols);
  } else {
    // TODO: a foreground rule for k > 2 (e.g. merge clusters by border
    // occupancy); for now the cluster with the fewest border patches wins.
    std::vector<std::int64_t> border(static_cast<std::size_t>(cfg.clusters), 0);
    for (int r = 0; r < features.grid_rows; ++r) {
      for (int c = 0; c < features.grid_cols; ++c) {
        if (r == 0 || c == 0 || r == features.grid_rows - 1 ||
            c == features.grid_cols - 1) {
          ++border[result.labels[static_cast<std::size_t>(r) * features.grid_cols + c]];
        }
      }
    }
    fg = static_cast<int>(std::min_element(border.begin(), border.end()) -
                          border.begin());
  }
  for (std::size_t i = 0; i < patch_bits.size(); ++i) {
    patch_bits[i] = result.labels[i] == fg ? 1 : 0;
  }

  result.mask = cfg.soft_upsample && !fallback
                    ? soft_upsample_mask(result.assignment, features.grid_rows,
                                         features.grid_cols, height, width, fg)
                    : assemble_mask(patch_bits, features.grid_rows,
                                    features.grid_cols, height, width, cfg.patch);
  if (cfg.refine) result.mask = refine_mask(result.mask);

  MaskMeta& meta = result.mask.meta;
  meta.tau = cfg.graph.tau;
  meta.seed = cfg.optim.seed;
  meta.epochs = cfg.optim.epochs;
  meta.activation = std::string(ad::to_string(cfg.net.activation));
  meta.foreground_rule = "border-occupancy";
  meta.foreground_cluster = fg;
  meta.trivial_partition = trivial;
  meta.refined = cfg.refine;

  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

SegResult run_image(const SegJob& job) {
  const FeatureMatrix features = read_ufv(job.features_path);
  SegResult result;
  try {
    result = segment_features(features, job.height, job.width, job.config);
  } catch (const DegenerateGraphError& e) {
    throw JobError(job.features_path + ": " + e.what() +
                   "; try a lower --tau");
  }
  if (job.gt_path) {
    const SegMask truth = read_mask(*job.gt_path);
    if (truth.width != result.mask.width || truth.height != result.mask.height) {
      throw JobError(*job.gt_path + ": ground truth is " +
                     std::to_string(truth.width) + "x" +
                     std::to_string(truth.height) + " but the mask is " +
                     std::to_string(result.mask.width) + "x" +
                     std::to_string(result.mask.height));
    }
    result.iou = iou(result.mask, truth);
    result.oracle_flip_miou = oracle_flip_miou(result.mask, truth);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Outputs

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json iou_json(const IoUBreakdown& b) {
  nlohmann::json j;
  j["miou"] = b.miou;
  nlohmann::json per = nlohmann::json::array();
  for (std::size_t c = 0; c < b.per_class.size(); ++c) {
    nlohmann::json e;
    e["class"] = c;
    e["iou"] = b.present(c) ? nlohmann::json(b.per_class[c]) : nlohmann::json();
    e["tp"] = b.tp[c];
    e["fp"] = b.fp[c];
    e["fn"] = b.fn[c];
    per.push_back(e);
  }
  j["per_class"] = per;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError(path, "cannot open for writing");
  os << text;
  if (!os) throw FormatError(path, "write failed");
}

}  // namespace

std::string loss_csv(const std::vector<LossReport>& history) {
  std::ostringstream os;
  os << "epoch,total,modularity_term,regularizer\n";
  for (const LossReport& r : history) {
    os << r.epoch << ',' << format_double(r.total) << ','
       << format_double(r.modularity_term) << ',' << format_double(r.regularizer)
       << '\n';
  }
  return os.str();
}

std::string sidecar_json(const SegJob& job, const SegResult& result) {
  nlohmann::json j;
  j["features"] = job.features_path;
  if (job.gt_path) j["ground_truth"] = *job.gt_path;
  nlohmann::json cfg;
  for (const auto& [k, v] : describe(job.config)) cfg[k] = v;
  j["config"] = cfg;
  j["config_fingerprint"] = fingerprint(job.config);

  const MaskMeta& m = result.mask.meta;
  j["mask"] = {{"width", result.mask.width},
               {"height", result.mask.height},
               {"foreground_pixels", result.mask.foreground_count()},
               {"foreground_cluster", m.foreground_cluster},
               {"foreground_rule", m.foreground_rule},
               {"trivial_partition", m.trivial_partition},
               {"refined", m.refined},
               {"tau", m.tau},
               {"seed", m.seed},
               {"epochs", m.epochs},
               {"activation", m.activation}};

  nlohmann::json loss;
  if (!result.history.empty()) {
    const auto best = std::min_element(
        result.history.begin(), result.history.end(),
        [](const LossReport& a, const LossReport& b) { return a.total < b.total; });
    loss["epochs"] = result.history.size();
    loss["first"] = result.history.front().total;
    loss["last"] = result.history.back().total;
    loss["min"] = best->total;
    loss["min_epoch"] = best->epoch;
    loss["last_modularity_term"] = result.history.back().modularity_term;
    loss["last_regularizer"] = result.history.back().regularizer;
  }
  j["loss"] = loss;
  j["partition_modularity"] = result.modularity;
  if (result.iou) j["iou"] = iou_json(*result.iou);
  if (result.oracle_flip_miou) j["oracle_flip_miou_diagnostic"] = *result.oracle_flip_miou;
  j["seconds"] = result.seconds;
  return j.dump(2) + "\n";
}

void write_outputs(const SegJob& job, const SegResult& result,
                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path base = std::filesystem::path(out_dir) / job.stem();
  write_mask_pgm(base.string() + ".mask.pgm", result.mask);
  write_text(base.string() + ".json", sidecar_json(job, result));
  if (job.config.losscurve) {
    write_text(base.string() + ".loss.csv", loss_csv(result.history));
  }
}

}  // namespace armaseg
