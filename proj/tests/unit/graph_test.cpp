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

#include "armaseg/graph.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "armaseg/errors.hpp"
#include "oracles.hpp"

namespace armaseg {
namespace {

using testing::adjacency_from_edges;
using testing::gradient_mismatch;
using testing::normalized_dense;
using testing::numeric_gradient;
using testing::threshold_adjacency;
using testing::unit_rows;

FeatureMatrix features(const Matrix& values) {
  FeatureMatrix f;
  f.values = values;
  f.grid_rows = 1;
  f.grid_cols = static_cast<int>(values.rows());
  return f;
}

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

// Two orthogonal pairs of identical rows: graph = two disjoint edges.
PatchGraph two_disjoint_edges() {
  Matrix f(4, 2);
  f << 1, 0, 1, 0, 0, 1, 0, 1;
  return build_adjacency(features(f), {});
}

TEST(RowNormalize, ThreeFourFive) {
  Matrix f(1, 2);
  f << 3, 4;
  const FeatureMatrix out = row_normalize(features(f));
  EXPECT_NEAR(out.values(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(out.values(0, 1), 0.8, 1e-15);
}

TEST(RowNormalize, UnitRowUnchanged) {
  Matrix f(1, 3);
  f << 0.0, 1.0, 0.0;
  EXPECT_LT((row_normalize(features(f)).values - f).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RowNormalize, RandomRowsBecomeUnit) {
  const FeatureMatrix out = row_normalize(features(gaussian(10, 5, 1)));
  for (Eigen::Index i = 0; i < 10; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < 5; ++j) s += out.values(i, j) * out.values(i, j);
    EXPECT_NEAR(std::sqrt(s), 1.0, 1e-12);
  }
}

TEST(RowNormalize, ZeroRowNamesItsIndex) {
  Matrix f = Matrix::Ones(4, 3);
  f.row(2).setZero();
  try {
    row_normalize(features(f));
    FAIL() << "expected DegenerateInputError";
  } catch (const DegenerateInputError& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos) << e.what();
  }
}

TEST(BuildAdjacency, IdenticalRowsGiveCompleteGraph) {
  const PatchGraph g = build_adjacency(features(Matrix::Ones(4, 3) / std::sqrt(3.0)), {});
  EXPECT_EQ(g.degrees, (std::vector<std::int64_t>{3, 3, 3, 3}));
  EXPECT_EQ(g.edge_count(), 6.0);
  const Matrix a = g.dense_adjacency();
  for (int i = 0; i < 4; ++i) EXPECT_EQ(a(i, i), 0.0);
}

TEST(BuildAdjacency, OrthogonalGroupsGiveDisjointEdges) {
  const PatchGraph g = two_disjoint_edges();
  EXPECT_EQ(g.edge_count(), 2.0);
  EXPECT_EQ(g.degrees, (std::vector<std::int64_t>{1, 1, 1, 1}));
}

TEST(BuildAdjacency, MatchesLoopOracleExactly) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix unit = unit_rows(gaussian(8, 4, seed));
    GraphOptions opts;
    opts.tau = 0.45;
    const PatchGraph g = build_adjacency_unchecked(features(unit), opts);
    const auto oracle = threshold_adjacency(unit, 0.45);
    const Matrix a = g.dense_adjacency();
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) EXPECT_EQ(a(i, j), oracle[i][j]) << seed;
    }
  }
}

TEST(BuildAdjacency, ThresholdIsStrict) {
  // cos(angle) between the rows is exactly 0.5.
  Matrix f(2, 2);
  f << 1.0, 0.0, 0.5, std::sqrt(0.75);
  GraphOptions opts;
  opts.tau = 0.5;
  const double dot = f.row(0).dot(f.row(1));
  const PatchGraph g = build_adjacency_unchecked(features(f), opts);
  EXPECT_EQ(g.edge_count() > 0, dot > 0.5);
}

TEST(BuildAdjacency, TauOutsideOpenIntervalIsConfigError) {
  const FeatureMatrix f = features(Matrix::Identity(3, 3));
  for (double tau : {0.0, 1.0, -0.2, 1.5}) {
    GraphOptions opts;
    opts.tau = tau;
    EXPECT_THROW(build_adjacency(f, opts), ConfigError) << tau;
  }
}

TEST(BuildAdjacency, EdgelessGraphIsDegenerate) {
  EXPECT_THROW(build_adjacency(features(Matrix::Identity(3, 3)), {}), DegenerateGraphError);
  const PatchGraph g = build_adjacency_unchecked(features(Matrix::Identity(3, 3)), {});
  EXPECT_EQ(g.degree_sum, 0);
  EXPECT_THROW(modularity_matrix(g), DegenerateGraphError);
}

TEST(BuildAdjacency, SelfLoopsOnlyWhenAllowed) {
  GraphOptions opts;
  opts.allow_self_loops = true;
  const PatchGraph g = build_adjacency(features(Matrix::Identity(2, 2)), opts);
  EXPECT_EQ(g.dense_adjacency(), Matrix::Identity(2, 2));
}

TEST(BuildAdjacency, RejectsUnnormalizedRows) {
  EXPECT_THROW(build_adjacency(features(2.0 * Matrix::Identity(2, 2)), {}), ContractError);
}

TEST(BuildAdjacency, InvariantsOnRandomFeatures) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix unit = unit_rows(gaussian(40, 6, seed + 100));
    GraphOptions opts;
    opts.tau = 0.3;
    const PatchGraph g = build_adjacency_unchecked(features(unit), opts);
    const Matrix a = g.dense_adjacency();
    EXPECT_EQ(a, a.transpose());
    std::int64_t total = 0;
    for (int i = 0; i < 40; ++i) {
      EXPECT_EQ(a(i, i), 0.0);
      EXPECT_EQ(static_cast<std::int64_t>(a.row(i).sum()), g.degrees[i]);
      total += g.degrees[i];
    }
    EXPECT_EQ(total, g.degree_sum);
    const Matrix norm = g.norm_adj.to_dense();
    EXPECT_LT((norm - normalized_dense(threshold_adjacency(unit, 0.3))).cwiseAbs().maxCoeff(),
              1e-15);
    EXPECT_LT((norm - norm.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(BuildAdjacency, HigherThresholdKeepsSubsetOfEdges) {
  const FeatureMatrix f = features(unit_rows(gaussian(30, 5, 7)));
  Matrix previous;
  for (double tau : {0.1, 0.2, 0.35, 0.5, 0.7, 0.9}) {
    GraphOptions opts;
    opts.tau = tau;
    const Matrix a = build_adjacency_unchecked(f, opts).dense_adjacency();
    if (previous.size() > 0) {
      EXPECT_TRUE(((a.array() > 0) <= (previous.array() > 0)).all()) << tau;
    }
    previous = a;
  }
}

TEST(BuildAdjacency, IsolatedNodeKeepsZeroRow) {
  Matrix f(3, 2);
  f << 1, 0, 1, 0, 0, 1;
  const PatchGraph g = build_adjacency(features(f), {});
  EXPECT_EQ(g.degrees[2], 0);
  EXPECT_EQ(g.norm_adj.to_dense().row(2), Matrix::Zero(1, 3));
}

TEST(FromEdges, MergesDuplicatesAndDropsSelfLoops) {
  const PatchGraph g = PatchGraph::from_edges(4, {{0, 1}, {1, 0}, {2, 2}, {2, 3}});
  EXPECT_EQ(g.edge_count(), 2.0);
  const auto expected = adjacency_from_edges(4, {{0, 1}, {2, 3}});
  const Matrix a = g.dense_adjacency();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) EXPECT_EQ(a(i, j), expected[i][j]);
  }
}

TEST(ModularityMatrix, TriangleEntries) {
  const PatchGraph g = PatchGraph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  const Matrix b = modularity_matrix(g).b;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(b(i, j), i == j ? -4.0 / 6.0 : 1.0 / 3.0, 1e-15);
    }
  }
}

TEST(ModularityMatrix, DisjointEdgesEntries) {
  const PatchGraph g = two_disjoint_edges();
  const Matrix a = g.dense_adjacency();
  const Matrix b = modularity_matrix(g).b;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(b(i, j), a(i, j) - 0.25);
  }
}

TEST(ModularityMatrix, RowsSumToZeroAndSymmetric) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + trial;
    const auto edges = testing::random_edges(n, 0.3, rng);
    const Matrix b = modularity_matrix(PatchGraph::from_edges(n, edges)).b;
    EXPECT_LT((b * Matrix::Ones(n, 1)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((b - b.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ModularityMatrix, MatchesDirectFormula) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + trial % 7;
    const auto edges = testing::random_edges(n, 0.4, rng);
    const auto a = adjacency_from_edges(n, edges);
    std::vector<double> d(n, 0.0);
    double two_m = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) d[i] += a[i][j];
      two_m += d[i];
    }
    const Matrix b = modularity_matrix(PatchGraph::from_edges(n, edges)).b;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        EXPECT_NEAR(b(i, j), a[i][j] - d[i] * d[j] / two_m, 1e-15);
      }
    }
  }
}

TEST(SparseMatmul, CompleteGraphAveragesOtherRows) {
  const PatchGraph g = build_adjacency(features(Matrix::Ones(4, 2) / std::sqrt(2.0)), {});
  ad::Tape tape;
  const Matrix x = Matrix::Identity(4, 4);
  const Matrix y = sparse_matmul(g.norm_adj, tape.constant(x)).value();
  for (int i = 0; i < 4; ++i) {
    Matrix expected = Matrix::Zero(1, 4);
    for (int j = 0; j < 4; ++j) {
      if (j != i) expected += x.row(j) / 3.0;
    }
    EXPECT_LT((y.row(i) - expected).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(SparseMatmul, MatchesDenseProduct) {
  std::mt19937_64 rng(13);
  const auto edges = testing::random_edges(25, 0.2, rng);
  const PatchGraph g = PatchGraph::from_edges(25, edges);
  const Matrix x = gaussian(25, 7, 2);
  ad::Tape tape;
  const Matrix dense = normalized_dense(adjacency_from_edges(25, edges));
  const Matrix y = sparse_matmul(g.norm_adj, tape.constant(x)).value();
  EXPECT_LT((y - testing::naive_matmul(dense, x)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SparseMatmul, IsolatedNodeGivesZeroRow) {
  const PatchGraph g = PatchGraph::from_edges(3, {{0, 1}});
  ad::Tape tape;
  const Matrix y = sparse_matmul(g.norm_adj, tape.constant(Matrix::Ones(3, 2))).value();
  EXPECT_EQ(y.row(2), Matrix::Zero(1, 2));
}

TEST(SparseMatmul, RowMismatchIsShapeError) {
  const PatchGraph g = PatchGraph::from_edges(3, {{0, 1}});
  ad::Tape tape;
  EXPECT_THROW(sparse_matmul(g.norm_adj, tape.constant(Matrix::Ones(4, 2))), ShapeError);
}

TEST(SparseMatmul, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(19);
  const auto edges = testing::random_edges(12, 0.3, rng);
  const PatchGraph g = PatchGraph::from_edges(12, edges);
  const Matrix x0 = gaussian(12, 3, 4);
  ad::Tape tape;
  const ad::Tensor x = tape.parameter(x0);
  const ad::Tensor y = sparse_matmul(g.norm_adj, x);
  tape.backward(ad::sum(ad::activation(y, ad::Activation::kSiLU)));
  const auto f = [&](const Matrix& m) {
    ad::Tape t;
    return ad::sum(ad::activation(sparse_matmul(g.norm_adj, t.constant(m)),
                                  ad::Activation::kSiLU))
        .item();
  };
  EXPECT_LE(gradient_mismatch(x.grad(), numeric_gradient(f, x0)), 0.0);
}

TEST(FeatureMatrix, GridMustMatchRowCount) {
  FeatureMatrix f;
  f.values = Matrix::Ones(6, 2);
  f.grid_rows = 2;
  f.grid_cols = 2;
  EXPECT_THROW(f.validate(), ShapeError);
  f.grid_cols = 3;
  EXPECT_NO_THROW(f.validate());
}

}  // namespace
}  // namespace armaseg
