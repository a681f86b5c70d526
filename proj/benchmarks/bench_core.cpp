// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the hot paths: forward/gradient/hvp sweeps, Lanczos
// iterations and grid evaluation. Run with --benchmark_filter=... as usual.

#include <benchmark/benchmark.h>

#include "losscape/autodiff.hpp"
#include "losscape/data.hpp"
#include "losscape/directions.hpp"
#include "losscape/landscape.hpp"
#include "losscape/lanczos.hpp"
#include "losscape/models.hpp"
#include "losscape/rng.hpp"
#include "losscape/slq.hpp"
#include "losscape/sym_operator.hpp"
#include "losscape/trainer.hpp"

namespace {

using namespace losscape;

struct Fixture {
  Model model;
  Dataset data;
  FlatParams params;
  Batch batch;

  explicit Fixture(int in_dim, int hidden, int batch_size)
      : model(build_mlp({in_dim, hidden, 10}, Activation::tanh)),
        data(make_synthetic(10, in_dim, 4 * batch_size, 7)) {
    params = init_params(model, 11);
    std::vector<std::size_t> idx(static_cast<std::size_t>(batch_size));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    batch = data.make_batch(idx, model.input_sample_shape);
  }
};

void BM_ForwardLoss(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), 64, 128);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward_loss(f.model.graph, f.params, f.batch));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ForwardLoss)->RangeMultiplier(2)->Range(64, 512)->Complexity();

void BM_Gradient(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), 64, 128);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gradient(f.model.graph, f.params, f.batch));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Gradient)->RangeMultiplier(2)->Range(64, 512)->Complexity();

void BM_Hvp(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), 64, 128);
  Direction v = random_direction(f.model.layout(), 13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hvp(f.model.graph, f.params, f.batch, v));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Hvp)->RangeMultiplier(2)->Range(64, 512)->Complexity();

void BM_LanczosStep(benchmark::State& state) {
  Fixture f(128, 64, 128);
  ModelHessianOperator op(f.model.graph, f.params, {f.batch});
  std::vector<double> v0(op.dim());
  SplitMix64 rng(17);
  for (double& x : v0) x = rng.gaussian();
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lanczos(op, v0, m, /*keep_basis=*/false));
  }
}
BENCHMARK(BM_LanczosStep)->Arg(5)->Arg(10)->Arg(20);

void BM_GridCell(benchmark::State& state) {
  Fixture f(128, 64, 64);
  Trajectory traj;
  Snapshot s;
  s.iteration = 0;
  s.params = f.params;
  traj.snapshots.push_back(std::move(s));
  DirectionPair dirs;
  dirs.phi1 = filter_normalize(random_direction(f.model.layout(), 19), f.params);
  dirs.phi2 = filter_normalize(random_direction(f.model.layout(), 23), f.params);

  GridConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  cfg.fraction = 0.25;
  cfg.batch_size = 64;
  cfg.workers = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_grid(f.model, traj, dirs, f.data, cfg));
  }
}
BENCHMARK(BM_GridCell)->Args({8, 1})->Args({8, 2})->Args({16, 1})->Args({16, 2});

void BM_SlqProbes(benchmark::State& state) {
  Fixture f(128, 64, 128);
  ModelHessianOperator op(f.model.graph, f.params, {f.batch});
  SlqConfig cfg;
  cfg.k = 4;
  cfg.m = 10;
  cfg.workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(slq_spectrum(op, cfg));
  }
}
BENCHMARK(BM_SlqProbes)->Arg(1)->Arg(2);

}  // namespace

BENCHMARK_MAIN();
