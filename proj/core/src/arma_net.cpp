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

#include "armaseg/arma_net.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <unordered_map>

#include "armaseg/errors.hpp"
#include "binary_io.hpp"

namespace armaseg {

Architecture parse_architecture(std::string_view name) {
  if (name == "arma") return Architecture::kArma;
  if (name == "gcn") return Architecture::kGcn;
  throw ConfigError("unknown architecture '" + std::string(name) +
                    "' (expected arma or gcn)");
}

std::string_view to_string(Architecture arch) {
  return arch == Architecture::kArma ? "arma" : "gcn";
}

void ArmaConfig::validate() const {
  if (stacks < 1) throw ConfigError("stacks must be >= 1");
  if (layers < 1) throw ConfigError("layers must be >= 1");
  if (hidden < 0) throw ConfigError("hidden must be >= 0");
  if (head_hidden < 1) throw ConfigError("head_hidden must be >= 1");
}

ArmaModel::ArmaModel(const ArmaConfig& cfg, int c_in, int k)
    : cfg_(cfg), c_in_(c_in), hidden_(cfg.hidden > 0 ? cfg.hidden : c_in), k_(k) {
  cfg_.validate();
  if (c_in < 1) throw ConfigError("c_in must be >= 1");
  if (k < 2) throw ConfigError("cluster count k must be >= 2");
  if (cfg_.arch == Architecture::kGcn) cfg_.stacks = 1;

  const bool arma = cfg_.arch == Architecture::kArma;
  auto add = [this](Eigen::Index rows, Eigen::Index cols) {
    params_.emplace_back(Matrix::Zero(rows, cols));
    return params_.size() - 1;
  };

  w_idx_.assign(cfg_.stacks, std::vector<std::size_t>(cfg_.layers, npos));
  v_idx_.assign(cfg_.stacks, std::vector<std::size_t>(cfg_.layers, npos));
  for (int r = 0; r < cfg_.stacks; ++r) {
    if (cfg_.shared_weights) {
      w_idx_[r][0] = add(c_in_, hidden_);
      if (cfg_.layers > 1) {
        const std::size_t shared_w = add(hidden_, hidden_);
        for (int l = 1; l < cfg_.layers; ++l) w_idx_[r][l] = shared_w;
      }
      if (arma) {
        const std::size_t shared_v = add(c_in_, hidden_);
        for (int l = 0; l < cfg_.layers; ++l) v_idx_[r][l] = shared_v;
      }
    } else {
      for (int l = 0; l < cfg_.layers; ++l) {
        w_idx_[r][l] = add(l == 0 ? c_in_ : hidden_, hidden_);
        if (arma) v_idx_[r][l] = add(c_in_, hidden_);
      }
    }
  }
  head_ = params_.size();
  add(hidden_, cfg_.head_hidden);
  add(1, cfg_.head_hidden);
  add(cfg_.head_hidden, k_);
  add(1, k_);
}

std::size_t ArmaModel::w_index(int stack, int layer) const {
  return w_idx_.at(stack).at(layer);
}

std::size_t ArmaModel::v_index(int stack, int layer) const {
  return v_idx_.at(stack).at(layer);
}

std::size_t ArmaModel::parameter_count() const {
  std::size_t total = 0;
  for (const auto& p : params_) total += static_cast<std::size_t>(p.size());
  return total;
}

ArmaModel init_model(const ArmaConfig& cfg, int c_in, int k,
                     std::uint64_t seed) {
  ArmaModel model(cfg, c_in, k);
  std::mt19937_64 rng(seed);
  auto& params = model.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = params[i];
    const bool is_bias = i == model.head_b1() || i == model.head_b2();
    if (is_bias) continue;
    const double bound =
        std::sqrt(6.0 / static_cast<double>(p.rows() + p.cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.cols(); ++c) p(r, c) = dist(rng);
    }
  }
  return model;
}

namespace {

ModelTensors bind(ad::Tape& tape, const ArmaModel& model, bool requires_grad) {
  ModelTensors out;
  out.params.reserve(model.params().size());
  for (const Matrix& p : model.params()) {
    out.params.push_back(tape.leaf(p, requires_grad));
  }
  return out;
}

}  // namespace

ModelTensors bind_parameters(ad::Tape& tape, const ArmaModel& model) {
  return bind(tape, model, true);
}

ad::Tensor arma_forward(const ArmaModel& model, const ModelTensors& bound,
                        const PatchGraph& g, const ad::Tensor& x) {
  if (x.rows() != g.n) {
    throw ShapeError("arma_forward: " + std::to_string(x.rows()) +
                     " feature rows for a graph of " + std::to_string(g.n) +
                     " nodes");
  }
  if (x.cols() != model.c_in()) {
    throw ShapeError("arma_forward: features have " + std::to_string(x.cols()) +
                     " columns, model expects " + std::to_string(model.c_in()));
  }
  const ArmaConfig& cfg = model.config();
  const bool arma = cfg.arch == Architecture::kArma;

  std::vector<ad::Tensor> stack_out;
  stack_out.reserve(cfg.stacks);
  for (int r = 0; r < cfg.stacks; ++r) {
    std::unordered_map<std::size_t, ad::Tensor> skip_cache;
    ad::Tensor h = x;
    for (int l = 0; l < cfg.layers; ++l) {
      const ad::Tensor& w = bound.params[model.w_index(r, l)];
      ad::Tensor pre = sparse_matmul(g.norm_adj, ad::matmul(h, w));
      if (arma) {
        const std::size_t vi = model.v_index(r, l);
        auto it = skip_cache.find(vi);
        if (it == skip_cache.end()) {
          it = skip_cache.emplace(vi, ad::matmul(x, bound.params[vi])).first;
        }
        pre = ad::add(pre, it->second);
      }
      const bool last = l + 1 == cfg.layers;
      h = (!last || cfg.activate_last) ? ad::activation(pre, cfg.activation)
                                       : pre;
    }
    stack_out.push_back(h);
  }
  return stack_out.size() == 1 ? stack_out.front() : ad::mean(stack_out);
}

ad::Tensor cluster_head(const ArmaModel& model, const ModelTensors& bound,
                        const ad::Tensor& h) {
  const auto& p = bound.params;
  ad::Tensor z = ad::add_row_vector(ad::matmul(h, p[model.head_w1()]),
                                    p[model.head_b1()]);
  z = ad::activation(z, model.config().activation);
  z = ad::add_row_vector(ad::matmul(z, p[model.head_w2()]), p[model.head_b2()]);
  return ad::row_softmax(z);
}

Matrix predict(const ArmaModel& model, const PatchGraph& g, const Matrix& x) {
  ad::Tape tape;
  ModelTensors bound = bind(tape, model, false);
  ad::Tensor xt = tape.constant(x);
  return cluster_head(model, bound, arma_forward(model, bound, g, xt)).value();
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kModelMagic[4] = {'U', 'A', 'M', '1'};
constexpr std::uint32_t kModelVersion = 1;

}  // namespace

void save_model(const ArmaModel& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError(path, "cannot open for writing");
  using detail::put_le;
  const ArmaConfig& cfg = model.config();
  os.write(kModelMagic, 4);
  put_le<std::uint32_t>(os, kModelVersion);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(cfg.arch));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(cfg.stacks));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(cfg.layers));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(model.hidden()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(cfg.head_hidden));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(cfg.activation));
  put_le<std::uint32_t>(os, cfg.shared_weights ? 1u : 0u);
  put_le<std::uint32_t>(os, cfg.activate_last ? 1u : 0u);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(model.c_in()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(model.clusters()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(model.params().size()));
  for (const Matrix& p : model.params()) {
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.rows()));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.cols()));
    for (Eigen::Index i = 0; i < p.size(); ++i) detail::put_f64(os, p.data()[i]);
  }
  if (!os) throw FormatError(path, "write failed");
}

ArmaModel load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError(path, "cannot open for reading");
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != std::string(kModelMagic, 4)) {
    throw FormatError(path, "bad magic (expected UAM1)");
  }
  auto u32 = [&](const char* what) {
    return detail::get_le<std::uint32_t>(is, path, what);
  };
  if (u32("version") != kModelVersion) {
    throw FormatError(path, "unsupported checkpoint version");
  }
  ArmaConfig cfg;
  const auto arch = u32("arch");
  if (arch > 1) throw FormatError(path, "unknown architecture code");
  cfg.arch = static_cast<Architecture>(arch);
  cfg.stacks = static_cast<int>(u32("stacks"));
  cfg.layers = static_cast<int>(u32("layers"));
  cfg.hidden = static_cast<int>(u32("hidden"));
  cfg.head_hidden = static_cast<int>(u32("head_hidden"));
  const auto act = u32("activation");
  if (act > 3) throw FormatError(path, "unknown activation code");
  cfg.activation = static_cast<ad::Activation>(act);
  cfg.shared_weights = u32("shared_weights") != 0;
  cfg.activate_last = u32("activate_last") != 0;
  const int c_in = static_cast<int>(u32("c_in"));
  const int k = static_cast<int>(u32("k"));
  const auto count = u32("parameter count");

  ArmaModel model;
  try {
    model = ArmaModel(cfg, c_in, k);
  } catch (const ConfigError& e) {
    throw FormatError(path, std::string("invalid config header: ") + e.what());
  }
  if (count != model.params().size()) {
    throw FormatError(path, "parameter count does not match the config header");
  }
  for (Matrix& p : model.params()) {
    const auto rows = u32("rows");
    const auto cols = u32("cols");
    if (rows != p.rows() || cols != p.cols()) {
      throw FormatError(path, "parameter shape does not match the config header");
    }
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      p.data()[i] = detail::get_f64(is, path, "parameter data");
    }
  }
  return model;
}

}  // namespace armaseg
