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

#include <algorithm>
#include <cmath>
#include <string>

#include "armaseg/errors.hpp"

namespace armaseg {

namespace {

// Numerator of the modularity scaled by (2m)^2, in exact integer arithmetic.
std::int64_t scaled_modularity(const PatchGraph& g, std::span<const int> labels,
                               int k, std::vector<std::int64_t>& cluster_degree) {
  cluster_degree.assign(static_cast<std::size_t>(k), 0);
  std::int64_t inside = 0;
  const CsrMatrix& a = g.adjacency;
  for (Eigen::Index i = 0; i < g.n; ++i) {
    const int ci = labels[i];
    cluster_degree[ci] += g.degrees[i];
    for (Eigen::Index e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) {
      if (labels[a.col_idx[e]] == ci) ++inside;
    }
  }
  std::int64_t expected = 0;
  for (auto dc : cluster_degree) expected += dc * dc;
  return g.degree_sum * inside - expected;
}

double as_modularity(std::int64_t scaled, std::int64_t two_m) {
  const double denom = static_cast<double>(two_m) * static_cast<double>(two_m);
  return static_cast<double>(scaled) / denom;
}

}  // namespace

double hard_modularity(const PatchGraph& g, std::span<const int> labels) {
  if (g.degree_sum == 0) {
    throw DegenerateGraphError("modularity undefined: graph has no edges");
  }
  if (static_cast<Eigen::Index>(labels.size()) != g.n) {
    throw ShapeError("hard_modularity: " + std::to_string(labels.size()) +
                     " labels for " + std::to_string(g.n) + " nodes");
  }
  int k = 0;
  for (int l : labels) {
    if (l < 0) throw ContractError("hard_modularity: negative cluster label");
    k = std::max(k, l + 1);
  }
  std::vector<std::int64_t> scratch;
  return as_modularity(scaled_modularity(g, labels, k, scratch), g.degree_sum);
}

ad::Tensor relaxed_modularity(const PatchGraph& g, const ModularityMatrix& b,
                              const ad::Tensor& c) {
  if (g.degree_sum == 0) {
    throw DegenerateGraphError("modularity undefined: graph has no edges");
  }
  if (c.rows() != g.n || b.b.rows() != g.n) {
    throw ShapeError("relaxed_modularity: assignment " + ad::to_string(c.shape()) +
                     " does not match a graph of " + std::to_string(g.n) +
                     " nodes");
  }
  return ad::scale(ad::trace_quadratic(c, b.b),
                   1.0 / static_cast<double>(g.degree_sum));
}

ad::Tensor collapse_regularizer(const ad::Tensor& c) {
  const Matrix& cv = c.value();
  const auto n = static_cast<double>(cv.rows());
  const auto k = static_cast<double>(cv.cols());
  if (cv.rows() == 0 || cv.cols() == 0) {
    throw ShapeError("collapse_regularizer: empty assignment");
  }
  const Eigen::RowVectorXd s = cv.colwise().sum();
  // sqrt(k * sum_j s_j^2) / n is exactly 1 for balanced integer column sums.
  const double root = std::sqrt(k * s.squaredNorm());
  Matrix out(1, 1);
  out(0, 0) = root / n - 1.0;
  return c.tape().record(
      std::move(out), {c},
      [s, root, n, k](const Matrix& g, const std::vector<Matrix*>& in) {
        if (!in[0] || root == 0.0) return;
        // d/dC_ij = k s_j / (n * root), identical for every row i.
        const Eigen::RowVectorXd row = (g(0, 0) * k / (n * root)) * s;
        in[0]->rowwise() += row;
      });
}

LossTerms modularity_loss(const PatchGraph& g, const ModularityMatrix& b,
                          const ad::Tensor& c) {
  LossTerms t;
  t.modularity_term = ad::scale(relaxed_modularity(g, b, c), -1.0);
  t.regularizer = collapse_regularizer(c);
  t.total = ad::add(t.modularity_term, t.regularizer);
  return t;
}

std::vector<int> hard_labels(const Matrix& c) {
  std::vector<int> labels(static_cast<std::size_t>(c.rows()), 0);
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    int best = 0;
    for (Eigen::Index j = 1; j < c.cols(); ++j) {
      if (c(i, j) > c(i, best)) best = static_cast<int>(j);
    }
    labels[i] = best;
  }
  return labels;
}

BipartitionOptimum exhaustive_max_bipartition(const PatchGraph& g) {
  if (g.degree_sum == 0) {
    throw DegenerateGraphError("modularity undefined: graph has no edges");
  }
  if (g.n > 24) {
    throw ContractError("exhaustive search limited to 24 nodes, got " +
                        std::to_string(g.n));
  }
  const auto n = static_cast<std::size_t>(g.n);
  std::vector<int> labels(n, 0);
  std::vector<std::int64_t> scratch;
  std::int64_t best = 0;
  std::uint64_t best_mask = 0;
  bool first = true;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) labels[i] = (mask >> i) & 1u;
    const std::int64_t q = scaled_modularity(g, labels, 2, scratch);
    if (first || q > best) {
      best = q;
      best_mask = mask;
      first = false;
    }
  }
  BipartitionOptimum out;
  out.modularity = as_modularity(best, g.degree_sum);
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.labels[i] = (best_mask >> i) & 1u;
  return out;
}

}  // namespace armaseg
