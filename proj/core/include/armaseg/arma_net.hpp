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
#include <string>
#include <string_view>
#include <vector>

#include "armaseg/autodiff.hpp"
#include "armaseg/graph.hpp"

namespace armaseg {

enum class Architecture {
  kArma,  // R parallel stacks of L skip-connected propagation layers
  kGcn,   // one stack of L plain sigma(A X W) layers
};

Architecture parse_architecture(std::string_view name);
std::string_view to_string(Architecture arch);

struct ArmaConfig {
  int stacks = 2;
  int layers = 4;
  /// Width of the propagation layers; 0 means "same as the input features".
  int hidden = 0;
  /// Width of the first head projection.
  int head_hidden = 64;
  ad::Activation activation = ad::Activation::kSiLU;
  /// Share W (after the first layer) and V across the layers of a stack.
  bool shared_weights = false;
  /// Apply the activation to the last layer of each stack as well.
  bool activate_last = true;
  Architecture arch = Architecture::kArma;

  void validate() const;
};

/// Learnable parameters. Every matrix lives in `params`, in declaration
/// order; the index helpers below address them.
class ArmaModel {
 public:
  ArmaModel() = default;
  ArmaModel(const ArmaConfig& cfg, int c_in, int k);

  const ArmaConfig& config() const { return cfg_; }
  int c_in() const { return c_in_; }
  int hidden() const { return hidden_; }
  int clusters() const { return k_; }

  /// Index of W for (stack, layer) in params(); shared layouts alias.
  std::size_t w_index(int stack, int layer) const;
  /// Index of V for (stack, layer); -1 (npos) for the GCN architecture.
  std::size_t v_index(int stack, int layer) const;
  std::size_t head_w1() const { return head_ + 0; }
  std::size_t head_b1() const { return head_ + 1; }
  std::size_t head_w2() const { return head_ + 2; }
  std::size_t head_b2() const { return head_ + 3; }

  std::vector<Matrix>& params() { return params_; }
  const std::vector<Matrix>& params() const { return params_; }
  std::size_t parameter_count() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  ArmaConfig cfg_;
  int c_in_ = 0;
  int hidden_ = 0;
  int k_ = 0;
  // Per stack, per layer: index of W and V in params_.
  std::vector<std::vector<std::size_t>> w_idx_;
  std::vector<std::vector<std::size_t>> v_idx_;
  std::size_t head_ = 0;
  std::vector<Matrix> params_;
};

/// Glorot-uniform weights, zero biases; deterministic for a fixed seed.
ArmaModel init_model(const ArmaConfig& cfg, int c_in, int k, std::uint64_t seed);

/// The model's parameters recorded on a tape as gradient-requiring leaves.
struct ModelTensors {
  std::vector<ad::Tensor> params;
};
ModelTensors bind_parameters(ad::Tape& tape, const ArmaModel& model);

/// Propagation network output (n x hidden): the mean over stacks of the
/// last layer of each stack.
ad::Tensor arma_forward(const ArmaModel& model, const ModelTensors& bound,
                        const PatchGraph& g, const ad::Tensor& x);

/// Row-stochastic soft assignment softmax(W2 act(W1 h + b1) + b2).
ad::Tensor cluster_head(const ArmaModel& model, const ModelTensors& bound,
                        const ad::Tensor& h);

/// Forward pass without gradients; returns the n x k assignment matrix.
Matrix predict(const ArmaModel& model, const PatchGraph& g, const Matrix& x);

/// Checkpoint file: magic "UAM1", a config header, then every parameter
/// matrix in declaration order as little-endian float64.
void save_model(const ArmaModel& model, const std::string& path);
ArmaModel load_model(const std::string& path);

}  // namespace armaseg
