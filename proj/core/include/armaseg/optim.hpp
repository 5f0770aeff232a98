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
#include <vector>

#include "armaseg/arma_net.hpp"
#include "armaseg/graph.hpp"

namespace armaseg {

struct OptimConfig {
  double lr = 1e-3;
  /// Decoupled weight decay: theta <- theta - lr * weight_decay * theta.
  double weight_decay = 1e-2;
  int epochs = 60;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Multiplicative per-epoch learning-rate factor; 1 disables it.
  double lr_decay = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct AdamState {
  int step = 0;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
};

/// One AdamW update of every parameter. Moments are created on first use.
/// Throws ShapeError when params, grads and state disagree.
void adam_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads,
               AdamState& state, const OptimConfig& cfg);

struct LossReport {
  int epoch = 0;
  double total = 0.0;
  double modularity_term = 0.0;  // -Q_relaxed
  double regularizer = 0.0;
};

struct TrainResult {
  Matrix assignment;  // n x k, after the last update
  std::vector<LossReport> history;
};

/// Full-graph optimization of `model` in place for cfg.epochs steps.
/// Throws DivergenceError carrying the epoch when the loss stops being finite.
TrainResult train(ArmaModel& model, const PatchGraph& g,
                  const ModularityMatrix& b, const Matrix& x,
                  const OptimConfig& cfg);

}  // namespace armaseg
