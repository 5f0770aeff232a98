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
#include <utility>
#include <vector>

#include "armaseg/autodiff.hpp"

namespace armaseg {

using ad::Matrix;

/// Per-patch embeddings laid out on the patch grid (row-major patch order).
struct FeatureMatrix {
  Matrix values;  // n x c_in
  int grid_rows = 0;
  int grid_cols = 0;

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index c_in() const { return values.cols(); }

  /// Throws ShapeError if grid_rows * grid_cols != n, DegenerateInputError on
  /// a non-finite entry or a row with norm <= 1e-12.
  void validate() const;
};

/// Compressed sparse row matrix of doubles.
struct CsrMatrix {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::vector<Eigen::Index> row_ptr;  // rows + 1 offsets
  std::vector<Eigen::Index> col_idx;
  std::vector<double> values;

  std::size_t nnz() const { return col_idx.size(); }
  Matrix to_dense() const;
  /// y = this * x
  Matrix multiply(const Matrix& x) const;
  /// y = this^T * x
  Matrix multiply_transposed(const Matrix& x) const;
};

struct GraphOptions {
  double tau = 0.5;
  bool allow_self_loops = false;
};

/// Thresholded-similarity patch graph.
struct PatchGraph {
  Eigen::Index n = 0;
  CsrMatrix adjacency;           // binary, symmetric
  std::vector<std::int64_t> degrees;
  std::int64_t degree_sum = 0;   // 2m
  CsrMatrix norm_adj;            // D^-1/2 A D^-1/2
  double tau = 0.0;

  double edge_count() const { return 0.5 * static_cast<double>(degree_sum); }
  Matrix dense_adjacency() const { return adjacency.to_dense(); }

  /// Builds the graph from an undirected edge list; duplicate and reversed
  /// pairs are merged. Self-loops (i, i) are kept only if allowed.
  static PatchGraph from_edges(Eigen::Index n,
                               const std::vector<std::pair<int, int>>& edges,
                               bool allow_self_loops = false);
  /// Builds the graph from a dense symmetric 0/1 matrix.
  static PatchGraph from_dense(const Matrix& adjacency);
};

/// Dense modularity matrix B = A - d d^T / 2m.
struct ModularityMatrix {
  Matrix b;
};

/// Scales every row to unit L2 norm. A row with norm <= 1e-12 throws
/// DegenerateInputError naming its index.
FeatureMatrix row_normalize(const FeatureMatrix& f);

/// A_ij = 1 iff i != j and <f_i, f_j> > tau (strictly). Expects unit rows.
/// tau outside (0, 1) throws ConfigError; an edgeless result throws
/// DegenerateGraphError.
PatchGraph build_adjacency(const FeatureMatrix& f, const GraphOptions& opts);

/// Same as build_adjacency but keeps edgeless graphs (used by tests that
/// exercise the isolated-node path).
PatchGraph build_adjacency_unchecked(const FeatureMatrix& f,
                                     const GraphOptions& opts);

/// Throws DegenerateGraphError when the graph has no edges.
ModularityMatrix modularity_matrix(const PatchGraph& g);

/// adj * x on the tape. `adj` is held by reference and must outlive the
/// backward pass.
ad::Tensor sparse_matmul(const CsrMatrix& adj, const ad::Tensor& x);

}  // namespace armaseg
