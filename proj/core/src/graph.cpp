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

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <Eigen/SparseCore>

#include "armaseg/errors.hpp"

namespace armaseg {

void FeatureMatrix::validate() const {
  if (static_cast<Eigen::Index>(grid_rows) * grid_cols != n()) {
    throw ShapeError("feature grid " + std::to_string(grid_rows) + "x" +
                     std::to_string(grid_cols) + " does not hold " +
                     std::to_string(n()) + " rows");
  }
  for (Eigen::Index i = 0; i < n(); ++i) {
    if (!values.row(i).allFinite()) {
      throw DegenerateInputError("feature row " + std::to_string(i) +
                                 " has a non-finite entry");
    }
    if (values.row(i).norm() <= 1e-12) {
      throw DegenerateInputError("feature row " + std::to_string(i) +
                                 " has zero norm");
    }
  }
}

Matrix CsrMatrix::to_dense() const {
  Matrix d = Matrix::Zero(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      d(i, col_idx[k]) = values[k];
    }
  }
  return d;
}

namespace {

using SparseView =
    Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, Eigen::Index>>;

SparseView as_eigen(const CsrMatrix& m) {
  return SparseView(m.rows, m.cols, static_cast<Eigen::Index>(m.nnz()),
                    m.row_ptr.data(), m.col_idx.data(), m.values.data());
}

}  // namespace

Matrix CsrMatrix::multiply(const Matrix& x) const {
  if (x.rows() != cols) {
    throw ShapeError("sparse product: matrix has " + std::to_string(cols) +
                     " columns, operand has " + std::to_string(x.rows()) +
                     " rows");
  }
  return Matrix(as_eigen(*this) * x);
}

Matrix CsrMatrix::multiply_transposed(const Matrix& x) const {
  if (x.rows() != rows) {
    throw ShapeError("sparse transposed product: matrix has " +
                     std::to_string(rows) + " rows, operand has " +
                     std::to_string(x.rows()));
  }
  return Matrix(as_eigen(*this).transpose() * x);
}

namespace {

// Fills degrees and the normalized adjacency from a finished binary CSR.
void finish_graph(PatchGraph& g) {
  const CsrMatrix& a = g.adjacency;
  g.degrees.assign(static_cast<std::size_t>(g.n), 0);
  for (Eigen::Index i = 0; i < g.n; ++i) {
    g.degrees[i] = a.row_ptr[i + 1] - a.row_ptr[i];
  }
  g.degree_sum = 0;
  for (auto d : g.degrees) g.degree_sum += d;

  g.norm_adj = a;
  for (Eigen::Index i = 0; i < g.n; ++i) {
    for (Eigen::Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const auto j = a.col_idx[k];
      g.norm_adj.values[k] =
          1.0 / std::sqrt(static_cast<double>(g.degrees[i]) *
                          static_cast<double>(g.degrees[j]));
    }
  }
}

PatchGraph from_neighbor_lists(Eigen::Index n,
                               const std::vector<std::vector<Eigen::Index>>& nb) {
  PatchGraph g;
  g.n = n;
  CsrMatrix& a = g.adjacency;
  a.rows = a.cols = n;
  a.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    a.row_ptr[i + 1] = a.row_ptr[i] + static_cast<Eigen::Index>(nb[i].size());
  }
  a.col_idx.reserve(static_cast<std::size_t>(a.row_ptr[n]));
  for (const auto& row : nb) {
    a.col_idx.insert(a.col_idx.end(), row.begin(), row.end());
  }
  a.values.assign(a.col_idx.size(), 1.0);
  finish_graph(g);
  return g;
}

}  // namespace

PatchGraph PatchGraph::from_edges(Eigen::Index n,
                                  const std::vector<std::pair<int, int>>& edges,
                                  bool allow_self_loops) {
  std::vector<std::set<Eigen::Index>> sets(static_cast<std::size_t>(n));
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw ShapeError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                       ") out of range for " + std::to_string(n) + " nodes");
    }
    if (u == v && !allow_self_loops) continue;
    sets[u].insert(v);
    sets[v].insert(u);
  }
  std::vector<std::vector<Eigen::Index>> nb(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    nb[i].assign(sets[i].begin(), sets[i].end());
  }
  return from_neighbor_lists(n, nb);
}

PatchGraph PatchGraph::from_dense(const Matrix& adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw ShapeError("adjacency must be square");
  }
  const Eigen::Index n = adjacency.rows();
  std::vector<std::vector<Eigen::Index>> nb(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = adjacency(i, j);
      if (v != 0.0 && v != 1.0) throw ContractError("adjacency must be 0/1");
      if (v != adjacency(j, i)) throw ContractError("adjacency not symmetric");
      if (v == 1.0) nb[i].push_back(j);
    }
  }
  return from_neighbor_lists(n, nb);
}

FeatureMatrix row_normalize(const FeatureMatrix& f) {
  FeatureMatrix out = f;
  for (Eigen::Index i = 0; i < f.n(); ++i) {
    const double norm = f.values.row(i).norm();
    if (!(norm > 1e-12)) {
      throw DegenerateInputError("cannot normalize feature row " +
                                 std::to_string(i) + ": zero norm");
    }
    out.values.row(i) /= norm;
  }
  return out;
}

PatchGraph build_adjacency_unchecked(const FeatureMatrix& f,
                                     const GraphOptions& opts) {
  if (!(opts.tau > 0.0 && opts.tau < 1.0)) {
    throw ConfigError("tau must lie in (0, 1), got " + std::to_string(opts.tau));
  }
  const Eigen::Index n = f.n();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(f.values.row(i).norm() - 1.0) > 1e-9) {
      throw ContractError("build_adjacency expects unit rows; row " +
                          std::to_string(i) + " is not normalized");
    }
  }

  std::vector<std::vector<Eigen::Index>> nb(static_cast<std::size_t>(n));
  // Similarities are formed in row blocks to bound memory at block x n.
  constexpr Eigen::Index kBlock = 256;
  for (Eigen::Index r0 = 0; r0 < n; r0 += kBlock) {
    const Eigen::Index rows = std::min(kBlock, n - r0);
    const Matrix sim = f.values.middleRows(r0, rows) * f.values.transpose();
    for (Eigen::Index bi = 0; bi < rows; ++bi) {
      const Eigen::Index i = r0 + bi;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j && !opts.allow_self_loops) continue;
        if (sim(bi, j) > opts.tau) nb[i].push_back(j);
      }
    }
  }
  // Floating-point products are not guaranteed to be symmetric; keep an
  // edge only if both directions passed, so A is exactly symmetric.
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& row = nb[i];
    row.erase(std::remove_if(row.begin(), row.end(),
                             [&](Eigen::Index j) {
                               return !std::binary_search(nb[j].begin(),
                                                          nb[j].end(), i);
                             }),
              row.end());
  }
  PatchGraph g = from_neighbor_lists(n, nb);
  g.tau = opts.tau;
  return g;
}

PatchGraph build_adjacency(const FeatureMatrix& f, const GraphOptions& opts) {
  PatchGraph g = build_adjacency_unchecked(f, opts);
  if (g.degree_sum == 0) {
    throw DegenerateGraphError(
        "no pair of patches has similarity above tau = " +
        std::to_string(opts.tau) + "; the graph has no edges");
  }
  return g;
}

ModularityMatrix modularity_matrix(const PatchGraph& g) {
  if (g.degree_sum == 0) {
    throw DegenerateGraphError("modularity matrix undefined: graph has no edges");
  }
  const Eigen::Index n = g.n;
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = static_cast<double>(g.degrees[i]);
  const double two_m = static_cast<double>(g.degree_sum);
  ModularityMatrix out;
  out.b = -(d * d.transpose()) / two_m;
  const CsrMatrix& a = g.adjacency;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      out.b(i, a.col_idx[k]) += 1.0;
    }
  }
  return out;
}

ad::Tensor sparse_matmul(const CsrMatrix& adj, const ad::Tensor& x) {
  Matrix out = adj.multiply(x.value());
  return x.tape().record(
      std::move(out), {x},
      [&adj](const Matrix& g, const std::vector<Matrix*>& in) {
        if (in[0]) *in[0] += adj.multiply_transposed(g);
      });
}

}  // namespace armaseg
