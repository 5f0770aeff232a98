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

#include "armaseg/objective.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "armaseg/errors.hpp"
#include "oracles.hpp"

namespace armaseg {
namespace {

using testing::adjacency_from_edges;
using testing::Edges;

const Edges kTwoEdges = {{0, 1}, {2, 3}};
const Edges kTriangle = {{0, 1}, {1, 2}, {0, 2}};

Matrix one_hot(const std::vector<int>& labels, int k) {
  Matrix c = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), k);
  for (std::size_t i = 0; i < labels.size(); ++i) c(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  return c;
}

double relaxed(const PatchGraph& g, const Matrix& c) {
  ad::Tape tape;
  return relaxed_modularity(g, modularity_matrix(g), tape.constant(c)).item();
}

double regularizer(const Matrix& c) {
  ad::Tape tape;
  return collapse_regularizer(tape.constant(c)).item();
}

TEST(HardModularity, SingleClusterIsExactlyZero) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + trial % 20;
    const PatchGraph g = PatchGraph::from_edges(n, testing::random_edges(n, 0.3, rng));
    EXPECT_EQ(hard_modularity(g, std::vector<int>(n, 0)), 0.0);
  }
}

TEST(HardModularity, DisjointEdgesNaturalSplitIsHalf) {
  const PatchGraph g = PatchGraph::from_edges(4, kTwoEdges);
  EXPECT_EQ(hard_modularity(g, std::vector<int>{0, 0, 1, 1}), 0.5);
}

TEST(HardModularity, MatchesIntegerOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 11;
    const Edges edges = testing::random_edges(n, 0.4, rng);
    std::vector<int> labels(n);
    std::uniform_int_distribution<int> pick(0, 2);
    for (int& l : labels) l = pick(rng);
    EXPECT_EQ(hard_modularity(PatchGraph::from_edges(n, edges), labels),
              testing::modularity_oracle(adjacency_from_edges(n, edges), labels));
  }
}

TEST(HardModularity, InvariantUnderRelabeling) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 10;
    const PatchGraph g = PatchGraph::from_edges(n, testing::random_edges(n, 0.3, rng));
    std::vector<int> labels(n);
    std::uniform_int_distribution<int> pick(0, 2);
    for (int& l : labels) l = pick(rng);
    std::vector<int> relabeled = labels;
    for (int& l : relabeled) l = (l + 1) % 3;
    EXPECT_EQ(hard_modularity(g, labels), hard_modularity(g, relabeled));
  }
}

TEST(HardModularity, StaysInUnitInterval) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 12;
    const PatchGraph g = PatchGraph::from_edges(n, testing::random_edges(n, 0.5, rng));
    std::vector<int> labels(n);
    std::uniform_int_distribution<int> pick(0, 3);
    for (int& l : labels) l = pick(rng);
    const double q = hard_modularity(g, labels);
    EXPECT_GE(q, -1.0);
    EXPECT_LE(q, 1.0);
  }
}

TEST(HardModularity, Errors) {
  EXPECT_THROW(hard_modularity(PatchGraph::from_edges(3, {}), std::vector<int>{0, 0, 1}),
               DegenerateGraphError);
  const PatchGraph g = PatchGraph::from_edges(3, kTriangle);
  EXPECT_THROW(hard_modularity(g, std::vector<int>{0, 1}), ShapeError);
  EXPECT_THROW(hard_modularity(g, std::vector<int>{0, -1, 1}), ContractError);
}

TEST(RelaxedModularity, TriangleSingleClusterIsZero) {
  const PatchGraph g = PatchGraph::from_edges(3, kTriangle);
  EXPECT_NEAR(relaxed(g, one_hot({0, 0, 0}, 2)), 0.0, 1e-15);
}

TEST(RelaxedModularity, DisjointEdgesNaturalSplitIsHalf) {
  const PatchGraph g = PatchGraph::from_edges(4, kTwoEdges);
  EXPECT_NEAR(relaxed(g, one_hot({0, 0, 1, 1}, 2)), 0.5, 1e-15);
}

TEST(RelaxedModularity, UniformAssignmentIsZero) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + trial;
    const PatchGraph g = PatchGraph::from_edges(n, testing::random_edges(n, 0.3, rng));
    EXPECT_NEAR(relaxed(g, Matrix::Constant(n, 2, 0.5)), 0.0, 1e-12);
  }
}

TEST(RelaxedModularity, EqualsHardForOneHotAssignments) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 11;
    const int k = 2 + trial % 3;
    const PatchGraph g = PatchGraph::from_edges(n, testing::random_edges(n, 0.35, rng));
    std::vector<int> labels(n);
    std::uniform_int_distribution<int> pick(0, k - 1);
    for (int& l : labels) l = pick(rng);
    EXPECT_NEAR(relaxed(g, one_hot(labels, k)), hard_modularity(g, labels), 1e-12);
  }
}

TEST(RelaxedModularity, ShapeMismatch) {
  const PatchGraph g = PatchGraph::from_edges(3, kTriangle);
  EXPECT_THROW(relaxed(g, Matrix::Constant(4, 2, 0.5)), ShapeError);
}

TEST(CollapseRegularizer, BalancedHardIsExactlyZero) {
  for (int n : {2, 4, 10, 784}) {
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = i % 2;
    EXPECT_EQ(regularizer(one_hot(labels, 2)), 0.0) << n;
  }
}

TEST(CollapseRegularizer, CollapseIsRootKMinusOne) {
  for (int k : {2, 3, 5}) {
    EXPECT_NEAR(regularizer(one_hot(std::vector<int>(12, 0), k)), std::sqrt(k) - 1.0, 1e-12);
  }
  EXPECT_NEAR(regularizer(one_hot(std::vector<int>(7, 1), 2)), 0.414214, 1e-6);
}

TEST(CollapseRegularizer, UniformSoftIsZero) {
  EXPECT_NEAR(regularizer(Matrix::Constant(9, 3, 1.0 / 3.0)), 0.0, 1e-15);
}

TEST(CollapseRegularizer, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Matrix c0(8, 3);
  for (Eigen::Index i = 0; i < c0.size(); ++i) c0.data()[i] = u(rng);
  ad::Tape tape;
  const ad::Tensor c = tape.parameter(c0);
  tape.backward(collapse_regularizer(c));
  EXPECT_LE(testing::gradient_mismatch(c.grad(), testing::numeric_gradient(regularizer, c0)),
            0.0);
}

TEST(Loss, UniformAssignmentIsZero) {
  const PatchGraph g = PatchGraph::from_edges(4, kTwoEdges);
  ad::Tape tape;
  const LossTerms l =
      modularity_loss(g, modularity_matrix(g), tape.constant(Matrix::Constant(4, 2, 0.5)));
  EXPECT_EQ(l.total.item(), 0.0);
}

TEST(Loss, NaturalSplitOfDisjointEdges) {
  const PatchGraph g = PatchGraph::from_edges(4, kTwoEdges);
  ad::Tape tape;
  const LossTerms l =
      modularity_loss(g, modularity_matrix(g), tape.constant(one_hot({0, 0, 1, 1}, 2)));
  EXPECT_NEAR(l.total.item(), -0.5, 1e-15);
  EXPECT_NEAR(l.modularity_term.item(), -0.5, 1e-15);
  EXPECT_EQ(l.regularizer.item(), 0.0);
}

TEST(Loss, CollapsedAssignment) {
  const PatchGraph g = PatchGraph::from_edges(4, kTwoEdges);
  ad::Tape tape;
  const LossTerms l =
      modularity_loss(g, modularity_matrix(g), tape.constant(one_hot({1, 1, 1, 1}, 2)));
  EXPECT_NEAR(l.total.item(), std::sqrt(2.0) - 1.0, 1e-12);
}

TEST(Loss, TotalIsSumOfTermsAndBoundedByOptimum) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 8;
    const Edges edges = testing::random_edges(n, 0.4, rng);
    const PatchGraph g = PatchGraph::from_edges(n, edges);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix c(n, 2);
    for (int i = 0; i < n; ++i) {
      c(i, 0) = u(rng);
      c(i, 1) = 1.0 - c(i, 0);
    }
    ad::Tape tape;
    const LossTerms l = modularity_loss(g, modularity_matrix(g), tape.constant(c));
    EXPECT_NEAR(l.total.item(), l.modularity_term.item() + l.regularizer.item(), 1e-12);
    const double q_max = testing::exhaustive_best_modularity(adjacency_from_edges(n, edges));
    EXPECT_GE(l.total.item(), -q_max - 1e-12);
  }
}

TEST(HardLabels, ArgmaxWithLowerIndexTies) {
  Matrix c(3, 3);
  c << 0.2, 0.5, 0.3, 0.4, 0.4, 0.2, 0.1, 0.1, 0.8;
  EXPECT_EQ(hard_labels(c), (std::vector<int>{1, 0, 2}));
}

TEST(ExhaustiveBipartition, MatchesBruteForceExactly) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 6;
    const Edges edges = testing::random_edges(n, 0.45, rng);
    const PatchGraph g = PatchGraph::from_edges(n, edges);
    const BipartitionOptimum best = exhaustive_max_bipartition(g);
    EXPECT_EQ(best.modularity, testing::exhaustive_best_modularity(adjacency_from_edges(n, edges)));
    EXPECT_EQ(hard_modularity(g, best.labels), best.modularity);
  }
}

TEST(ExhaustiveBipartition, DisjointEdgesOptimumIsHalf) {
  EXPECT_EQ(exhaustive_max_bipartition(PatchGraph::from_edges(4, kTwoEdges)).modularity, 0.5);
}

}  // namespace
}  // namespace armaseg
