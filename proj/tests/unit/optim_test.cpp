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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "armaseg/errors.hpp"
#include "armaseg/metrics.hpp"
#include "armaseg/objective.hpp"
#include "armaseg/synthetic.hpp"
#include "oracles.hpp"

namespace armaseg {
namespace {

OptimConfig no_decay() {
  OptimConfig cfg;
  cfg.weight_decay = 0.0;
  return cfg;
}

TEST(AdamStep, FirstStepMovesByLearningRateAgainstGradient) {
  std::vector<Matrix> params = {Matrix::Zero(1, 3)};
  Matrix g(1, 3);
  g << 2.5, -0.01, 400.0;
  AdamState state;
  const OptimConfig cfg = no_decay();
  adam_step(params, {g}, state, cfg);
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(params[0](0, j), -cfg.lr * (g(0, j) > 0 ? 1.0 : -1.0), 1e-9);
  }
  EXPECT_EQ(state.step, 1);
}

TEST(AdamStep, ZeroGradientLeavesParametersUnchanged) {
  const Matrix start = Matrix::Constant(2, 2, 0.3);
  std::vector<Matrix> params = {start};
  AdamState state;
  for (int i = 0; i < 3; ++i) adam_step(params, {Matrix::Zero(2, 2)}, state, no_decay());
  EXPECT_EQ(params[0], start);
}

TEST(AdamStep, QuadraticTrajectoryMatchesReference) {
  for (double wd : {0.0, 1e-2}) {
    OptimConfig cfg;
    cfg.weight_decay = wd;
    cfg.lr = 0.05;
    std::vector<Matrix> params = {Matrix::Constant(1, 1, 1.0)};
    AdamState state;
    testing::ReferenceAdam ref{cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, wd, {}, {}};
    std::vector<double> theta = {1.0};
    for (int step = 0; step < 10; ++step) {
      // f = theta^2 / 2, gradient theta
      adam_step(params, {params[0]}, state, cfg);
      ref.step(theta, {theta[0]});
      EXPECT_NEAR(params[0](0, 0), theta[0], 1e-10) << "step " << step;
    }
  }
}

TEST(AdamStep, ShapeMismatch) {
  std::vector<Matrix> params = {Matrix::Zero(2, 2)};
  AdamState state;
  EXPECT_THROW(adam_step(params, {Matrix::Zero(2, 3)}, state, {}), ShapeError);
  EXPECT_THROW(adam_step(params, {}, state, {}), ShapeError);
}

TEST(OptimConfig, Validation) {
  OptimConfig cfg;
  cfg.lr = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.epochs = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

struct SbmCase {
  PatchGraph graph;
  ModularityMatrix b;
  Matrix x;
  std::vector<int> truth;
};

SbmCase sbm_case(std::uint64_t seed) {
  const SbmSample s = generate_sbm({}, seed);
  SbmCase c{PatchGraph::from_edges(s.n, s.edges), {}, row_normalize(s.features).values,
            s.labels};
  c.b = modularity_matrix(c.graph);
  return c;
}

TEST(Train, RecoversPlantedBlocks) {
  int recovered = 0;
  int decreasing = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SbmCase c = sbm_case(seed);
    OptimConfig cfg;
    cfg.seed = seed;
    ArmaModel m = init_model({}, static_cast<int>(c.x.cols()), 2, seed);
    const TrainResult r = train(m, c.graph, c.b, c.x, cfg);
    ASSERT_EQ(r.history.size(), 60u);
    if (adjusted_rand_index(hard_labels(r.assignment), c.truth) >= 0.95) ++recovered;
    if (r.history.back().total <= r.history.front().total) ++decreasing;
  }
  EXPECT_GE(recovered, 9);
  EXPECT_GE(decreasing, 9);
}

TEST(Train, TwoDisjointEdgesReachOptimum) {
  const PatchGraph g = PatchGraph::from_edges(4, {{0, 1}, {2, 3}});
  const ModularityMatrix b = modularity_matrix(g);
  Matrix x(4, 2);
  x << 1, 0, 1, 0, 0, 1, 0, 1;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ArmaModel m = init_model({}, 2, 2, seed);
    const TrainResult r = train(m, g, b, x, {});
    EXPECT_GE(hard_modularity(g, hard_labels(r.assignment)), 0.5 - 0.05) << seed;
  }
}

TEST(Train, HistoryTermsAddUp) {
  const SbmCase c = sbm_case(3);
  ArmaModel m = init_model({}, 2, 2, 3);
  OptimConfig cfg;
  cfg.epochs = 5;
  const TrainResult r = train(m, c.graph, c.b, c.x, cfg);
  for (std::size_t e = 0; e < r.history.size(); ++e) {
    EXPECT_EQ(r.history[e].epoch, static_cast<int>(e));
    EXPECT_NEAR(r.history[e].total, r.history[e].modularity_term + r.history[e].regularizer,
                1e-12);
  }
}

TEST(Train, DeterministicForFixedSeed) {
  const SbmCase c = sbm_case(4);
  TrainResult runs[2];
  for (auto& r : runs) {
    ArmaModel m = init_model({}, 2, 2, 11);
    r = train(m, c.graph, c.b, c.x, {});
  }
  EXPECT_EQ(runs[0].assignment, runs[1].assignment);
  for (std::size_t e = 0; e < runs[0].history.size(); ++e) {
    EXPECT_EQ(runs[0].history[e].total, runs[1].history[e].total);
  }
}

TEST(Train, LearningRateDecayChangesTrajectory) {
  const SbmCase c = sbm_case(5);
  OptimConfig decayed;
  decayed.lr_decay = 0.9;
  ArmaModel a = init_model({}, 2, 2, 1);
  ArmaModel b = init_model({}, 2, 2, 1);
  const TrainResult ra = train(a, c.graph, c.b, c.x, {});
  const TrainResult rb = train(b, c.graph, c.b, c.x, decayed);
  EXPECT_EQ(ra.history[0].total, rb.history[0].total);
  EXPECT_NE(ra.history.back().total, rb.history.back().total);
}

TEST(Train, NonFiniteLossReportsEpoch) {
  const SbmCase c = sbm_case(6);
  ArmaModel m = init_model({}, 2, 2, 0);
  OptimConfig cfg;
  cfg.lr = 1e300;
  cfg.weight_decay = 0.0;
  try {
    train(m, c.graph, c.b, c.x, cfg);
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.epoch(), 1);
  }
}

TEST(Train, EdgelessGraphRejected) {
  ArmaModel m = init_model({}, 2, 2, 0);
  const PatchGraph g = PatchGraph::from_edges(3, {});
  EXPECT_THROW(train(m, g, ModularityMatrix{Matrix::Zero(3, 3)}, Matrix::Ones(3, 2), {}),
               DegenerateGraphError);
}

}  // namespace
}  // namespace armaseg
