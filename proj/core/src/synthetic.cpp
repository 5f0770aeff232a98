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

#include "armaseg/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "armaseg/errors.hpp"
#include "armaseg/io.hpp"

namespace armaseg {

void BlobParams::validate() const {
  if (grid < 2) throw ConfigError("blob: grid must be >= 2");
  if (side < 1 || side >= grid) throw ConfigError("blob: side must lie in [1, grid)");
  if (dims < 2) throw ConfigError("blob: dims must be >= 2");
  if (!(theta_deg > 0.0 && theta_deg <= 180.0)) {
    throw ConfigError("blob: theta_deg must lie in (0, 180]");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("blob: sigma must be finite and >= 0");
  }
  if (patch < 1) throw ConfigError("blob: patch must be >= 1");
}

BlobSample generate_blob(const BlobParams& p, std::uint64_t seed) {
  p.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double theta = p.theta_deg * std::numbers::pi / 180.0;

  Eigen::RowVectorXd fg = Eigen::RowVectorXd::Zero(p.dims);
  Eigen::RowVectorXd bg = Eigen::RowVectorXd::Zero(p.dims);
  fg(0) = 1.0;
  bg(0) = std::cos(theta);
  bg(1) = std::sin(theta);

  const int n = p.grid * p.grid;
  const int lo = (p.grid - p.side) / 2;
  const int hi = lo + p.side;
  BlobSample s;
  s.features.grid_rows = p.grid;
  s.features.grid_cols = p.grid;
  s.features.values.resize(n, p.dims);
  s.patch_labels.resize(static_cast<std::size_t>(n));
  for (int r = 0; r < p.grid; ++r) {
    for (int c = 0; c < p.grid; ++c) {
      const int i = r * p.grid + c;
      const bool inside = r >= lo && r < hi && c >= lo && c < hi;
      s.patch_labels[static_cast<std::size_t>(i)] = inside ? 1 : 0;
      auto row = s.features.values.row(i);
      row = inside ? fg : bg;
      for (int d = 0; d < p.dims; ++d) row(d) += p.sigma * noise(rng);
    }
  }

  const int px = p.grid * p.patch;
  s.truth = SegMask(px, px);
  for (int y = 0; y < px; ++y) {
    for (int x = 0; x < px; ++x) {
      s.truth.at(y, x) = static_cast<std::uint8_t>(
          s.patch_labels[static_cast<std::size_t>(y / p.patch) * p.grid + x / p.patch]);
    }
  }
  return s;
}

void SbmParams::validate() const {
  if (blocks < 1) throw ConfigError("sbm: blocks must be >= 1");
  if (block_size < 2) throw ConfigError("sbm: block_size must be >= 2");
  const auto prob = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!prob(p_in) || !prob(p_out)) {
    throw ConfigError("sbm: p_in and p_out must lie in [0, 1]");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("sbm: sigma must be finite and >= 0");
  }
}

SbmSample generate_sbm(const SbmParams& p, std::uint64_t seed) {
  p.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  SbmSample s;
  s.n = p.blocks * p.block_size;
  s.labels.resize(static_cast<std::size_t>(s.n));
  for (int i = 0; i < s.n; ++i) s.labels[static_cast<std::size_t>(i)] = i / p.block_size;
  for (int i = 0; i < s.n; ++i) {
    for (int j = i + 1; j < s.n; ++j) {
      const bool same = s.labels[static_cast<std::size_t>(i)] ==
                        s.labels[static_cast<std::size_t>(j)];
      if (coin(rng) < (same ? p.p_in : p.p_out)) s.edges.emplace_back(i, j);
    }
  }
  s.features.grid_rows = 1;
  s.features.grid_cols = s.n;
  s.features.values.resize(s.n, p.blocks);
  for (int i = 0; i < s.n; ++i) {
    for (int b = 0; b < p.blocks; ++b) {
      s.features.values(i, b) =
          (b == s.labels[static_cast<std::size_t>(i)] ? 1.0 : 0.0) + p.sigma * noise(rng);
    }
  }
  return s;
}

namespace {

std::ofstream open_text(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError(path.string(), "cannot open for writing");
  return os;
}

}  // namespace

void write_blob(const BlobSample& sample, const std::string& out_dir,
                const std::string& stem) {
  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out / "features");
  std::filesystem::create_directories(out / "gt");
  write_ufv((out / "features" / (stem + ".ufv")).string(), sample.features);
  write_mask_pgm((out / "gt" / (stem + ".pgm")).string(), sample.truth);
}

void write_sbm(const SbmSample& sample, const std::string& out_dir,
               const std::string& stem) {
  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out / "features");
  write_ufv((out / "features" / (stem + ".ufv")).string(), sample.features);
  {
    std::ofstream os = open_text(out / "graph" / (stem + ".edges"));
    for (const auto& [i, j] : sample.edges) os << i << ' ' << j << '\n';
  }
  std::ofstream os = open_text(out / "gt" / (stem + ".labels"));
  for (int l : sample.labels) os << l << '\n';
}

}  // namespace armaseg
