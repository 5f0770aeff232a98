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
#include <span>
#include <vector>

#include "armaseg/autodiff.hpp"
#include "armaseg/graph.hpp"

namespace armaseg {

/// Modularity of a hard partition. Computed from integer edge and degree
/// counts, so the single-cluster partition scores exactly 0.
/// Throws DegenerateGraphError on an edgeless graph and ContractError when
/// a label lies outside [0, k) (k = max label + 1 when not given).
double hard_modularity(const PatchGraph& g, std::span<const int> labels);

/// Tr(C^T B C) / 2m on the tape.
ad::Tensor relaxed_modularity(const PatchGraph& g, const ModularityMatrix& b,
                              const ad::Tensor& c);

/// sqrt(k)/n * || sum_i C_i || - 1 on the tape; 0 for balanced assignments,
/// sqrt(k) - 1 for a total collapse onto one cluster.
ad::Tensor collapse_regularizer(const ad::Tensor& c);

struct LossTerms {
  ad::Tensor total;
  ad::Tensor modularity_term;  // -Q_relaxed
  ad::Tensor regularizer;
};

/// -relaxed_modularity + collapse_regularizer.
LossTerms modularity_loss(const PatchGraph& g, const ModularityMatrix& b,
                          const ad::Tensor& c);

/// Row-wise argmax; ties go to the lower cluster index.
std::vector<int> hard_labels(const Matrix& c);

struct BipartitionOptimum {
  double modularity = 0.0;
  std::vector<int> labels;
};

/// Best modularity over all 2^n assignments of nodes to two clusters
/// (including the trivial one). Intended for n <= 24.
BipartitionOptimum exhaustive_max_bipartition(const PatchGraph& g);

}  // namespace armaseg
