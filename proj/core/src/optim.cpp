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

#include "armaseg/optim.hpp"

#include <cmath>
#include <string>

#include "armaseg/errors.hpp"
#include "armaseg/objective.hpp"

namespace armaseg {

void OptimConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("learning rate must be > 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (weight_decay < 0.0) throw ConfigError("weight decay must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(eps > 0.0)) throw ConfigError("Adam eps must be > 0");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) {
    throw ConfigError("lr decay factor must lie in (0, 1]");
  }
}

void adam_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads,
               AdamState& state, const OptimConfig& cfg) {
  if (params.size() != grads.size()) {
    throw ShapeError("adam_step: " + std::to_string(params.size()) +
                     " parameters but " + std::to_string(grads.size()) +
                     " gradients");
  }
  if (state.first_moment.empty()) {
    for (const Matrix& p : params) {
      state.first_moment.push_back(Matrix::Zero(p.rows(), p.cols()));
      state.second_moment.push_back(Matrix::Zero(p.rows(), p.cols()));
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw ShapeError("adam_step: optimizer state has a different layout");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, state.step);
  const double c2 = 1.0 - std::pow(cfg.beta2, state.step);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = params[i];
    const Matrix& g = grads[i];
    Matrix& m = state.first_moment[i];
    Matrix& v = state.second_moment[i];
    if (g.rows() != p.rows() || g.cols() != p.cols() || m.rows() != p.rows() ||
        m.cols() != p.cols()) {
      throw ShapeError("adam_step: shape mismatch for parameter " +
                       std::to_string(i) + ": " +
                       ad::to_string({p.rows(), p.cols()}) + " vs gradient " +
                       ad::to_string({g.rows(), g.cols()}));
    }
    if (cfg.weight_decay != 0.0) p *= 1.0 - cfg.lr * cfg.weight_decay;
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    p.array() -= cfg.lr * (m.array() / c1) /
                 ((v.array() / c2).sqrt() + cfg.eps);
  }
}

TrainResult train(ArmaModel& model, const PatchGraph& g,
                  const ModularityMatrix& b, const Matrix& x,
                  const OptimConfig& cfg) {
  cfg.validate();
  if (g.degree_sum == 0) {
    throw DegenerateGraphError("cannot train on a graph without edges");
  }
  if (x.rows() != g.n || b.b.rows() != g.n) {
    throw ShapeError("train: features, graph and modularity matrix disagree "
                     "on the node count");
  }

  TrainResult result;
  result.history.reserve(static_cast<std::size_t>(cfg.epochs));
  AdamState state;
  OptimConfig step_cfg = cfg;
  std::vector<Matrix> grads;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    ad::Tape tape;
    ModelTensors bound = bind_parameters(tape, model);
    ad::Tensor xt = tape.constant(x);
    LossTerms loss;
    try {
      ad::Tensor c = cluster_head(model, bound, arma_forward(model, bound, g, xt));
      loss = modularity_loss(g, b, c);
    } catch (const NonFiniteError& e) {
      throw DivergenceError(epoch, "training diverged at epoch " +
                                       std::to_string(epoch) + ": " + e.what());
    }
    const double total = loss.total.item();
    if (!std::isfinite(total)) {
      throw DivergenceError(epoch, "non-finite loss at epoch " +
                                       std::to_string(epoch));
    }
    result.history.push_back({epoch, total, loss.modularity_term.item(),
                              loss.regularizer.item()});

    tape.backward(loss.total);
    grads.clear();
    for (const ad::Tensor& p : bound.params) grads.push_back(p.grad());
    step_cfg.lr = cfg.lr * std::pow(cfg.lr_decay, epoch);
    adam_step(model.params(), grads, state, step_cfg);
  }

  try {
    result.assignment = predict(model, g, x);
  } catch (const NonFiniteError& e) {
    throw DivergenceError(cfg.epochs, std::string("final forward pass: ") +
                                          e.what());
  }
  if (!result.assignment.allFinite()) {
    throw DivergenceError(cfg.epochs, "non-finite assignment after training");
  }
  return result;
}

}  // namespace armaseg
