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

// Microbenchmarks on blob feature grids of increasing size.

#include <benchmark/benchmark.h>

#include "armaseg/arma_net.hpp"
#include "armaseg/graph.hpp"
#include "armaseg/objective.hpp"
#include "armaseg/optim.hpp"
#include "armaseg/synthetic.hpp"

namespace {

using namespace armaseg;

FeatureMatrix blob_features(int grid) {
  BlobParams p;
  p.grid = grid;
  p.side = grid * 5 / 7;
  return row_normalize(generate_blob(p, 0).features);
}

void BM_BuildAdjacency(benchmark::State& state) {
  const FeatureMatrix f = blob_features(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_adjacency(f, GraphOptions{}));
  }
  state.SetItemsProcessed(state.iterations() * f.n() * f.n());
}
BENCHMARK(BM_BuildAdjacency)->Arg(14)->Arg(28)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_ModularityMatrix(benchmark::State& state) {
  const PatchGraph g = build_adjacency(blob_features(static_cast<int>(state.range(0))), {});
  for (auto _ : state) benchmark::DoNotOptimize(modularity_matrix(g));
}
BENCHMARK(BM_ModularityMatrix)->Arg(14)->Arg(28)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_SparsePropagate(benchmark::State& state) {
  const FeatureMatrix f = blob_features(static_cast<int>(state.range(0)));
  const PatchGraph g = build_adjacency(f, {});
  const Matrix x = Matrix::Random(f.n(), 16);
  for (auto _ : state) {
    ad::Tape tape;
    benchmark::DoNotOptimize(sparse_matmul(g.norm_adj, tape.constant(x)).value());
  }
  state.counters["nnz"] = static_cast<double>(g.norm_adj.values.size());
}
BENCHMARK(BM_SparsePropagate)->Arg(14)->Arg(28)->Arg(40)->Unit(benchmark::kMicrosecond);

// One epoch = forward, loss, backward and one Adam update.
void BM_TrainEpoch(benchmark::State& state) {
  const FeatureMatrix f = blob_features(static_cast<int>(state.range(0)));
  const PatchGraph g = build_adjacency(f, {});
  const ModularityMatrix b = modularity_matrix(g);
  OptimConfig cfg;
  cfg.epochs = 1;
  ArmaModel m = init_model(ArmaConfig{}, static_cast<int>(f.c_in()), 2, 0);
  for (auto _ : state) benchmark::DoNotOptimize(train(m, g, b, f.values, cfg));
}
BENCHMARK(BM_TrainEpoch)->Arg(14)->Arg(28)->Unit(benchmark::kMillisecond);

void BM_HardModularity(benchmark::State& state) {
  const PatchGraph g = build_adjacency(blob_features(static_cast<int>(state.range(0))), {});
  std::vector<int> labels(static_cast<std::size_t>(g.n));
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 2);
  for (auto _ : state) benchmark::DoNotOptimize(hard_modularity(g, labels));
}
BENCHMARK(BM_HardModularity)->Arg(28)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
