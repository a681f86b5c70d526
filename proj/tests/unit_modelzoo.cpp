// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "helpers.hpp"
#include "losscape/errors.hpp"
#include "losscape/models.hpp"
#include "losscape/trainer.hpp"

using namespace losscape;
using namespace losscape::testing;

TEST_CASE("mlp layout counts parameters exactly") {
  Model a = build_mlp({2, 3, 2});
  CHECK(a.layout()->total_count() == 2 * 3 + 3 + 3 * 2 + 2);  // 17

  Model b = build_mlp({784, 10});
  CHECK(b.layout()->total_count() == 7850);
}

TEST_CASE("lenet-mini exposes one conv_filter group per filter") {
  Model m = build_lenet_mini(8, {4, 8}, 10);
  int conv_groups = 0, fc_groups = 0, bias_groups = 0;
  for (const ParamGroup& g : m.layout()->groups()) {
    if (g.kind == GroupKind::conv_filter) ++conv_groups;
    if (g.kind == GroupKind::fc_row) ++fc_groups;
    if (g.kind == GroupKind::bias) ++bias_groups;
  }
  CHECK(conv_groups == 4 + 8);
  CHECK(fc_groups == 32 + 10);
  CHECK(bias_groups == 4);

  // conv1 4*(1*3*3)+4, conv2 8*(4*2*2)+8, fc1 32*8+32, fc2 10*32+10
  CHECK(m.layout()->total_count() == 40 + 136 + 288 + 330);
}

TEST_CASE("lenet-mini rejects geometries that collapse below one pixel") {
  CHECK_THROWS_AS(build_lenet_mini(7, {4, 8}, 10), Error);

  GraphBuilder b;
  int x = b.input({1, 2, 2});
  int w = b.conv_weight("w", 1, 1, 3, 3);
  CHECK_THROWS_AS(b.conv2d(x, w), Error);
}

TEST_CASE("synthetic datasets are deterministic and balanced") {
  Dataset a = make_synthetic(5, 8, 40, 1234);
  Dataset b = make_synthetic(5, 8, 40, 1234);
  CHECK(a.features() == b.features());
  CHECK(a.labels() == b.labels());

  Dataset c = make_synthetic(5, 8, 40, 999);
  CHECK(a.features() != c.features());

  SUBCASE("samples == classes yields exactly one sample per class") {
    Dataset d = make_synthetic(7, 4, 7, 5);
    std::vector<int> histogram(7, 0);
    for (int y : d.labels()) ++histogram[static_cast<std::size_t>(y)];
    for (int h : histogram) CHECK(h == 1);
  }
}

TEST_CASE("well-separated blobs are linearly separable") {
  Dataset ds = make_synthetic(3, 5, 120, 77, /*separation=*/8.0);
  Model m = build_mlp({5, 3});
  OptimizerConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.momentum = 0.9;
  cfg.batch_size = 40;
  cfg.epochs = 30;
  cfg.seed = 3;
  cfg.checkpoint_every = 1000;
  Trajectory traj = train_sgd(m, init_params(m, 11), ds, cfg);
  REQUIRE(!traj.aborted);
  CHECK(accuracy(m, traj.snapshots.back().params, ds) == 1.0);
}

TEST_CASE("sgd momentum follows the hand-computed recurrence") {
  // Loss 0.5 * theta^2, theta0 = 1, lr = 0.1, mu = 0.9:
  // step 1: u = 1,   theta = 0.9
  // step 2: u = 1.8, theta = 0.9 - 0.18 = 0.72
  QuadraticModel q = build_quadratic({1.0}, 1);
  Model m;
  m.graph = q.graph;
  m.input_sample_shape = {1};

  Dataset ds(std::vector<double>{0.0}, {1}, std::vector<int>{0}, 1);
  OptimizerConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.momentum = 0.9;
  cfg.batch_size = 1;
  cfg.epochs = 2;  // one iteration per epoch
  cfg.checkpoint_every = 1;

  FlatParams theta0(m.layout());
  theta0.values[0] = 1.0;
  Trajectory traj = train_sgd(m, theta0, ds, cfg);

  REQUIRE(traj.snapshots.size() == 3);
  CHECK(traj.snapshots[0].params.values[0] == 1.0);
  CHECK(std::fabs(traj.snapshots[1].params.values[0] - 0.9) < 1e-15);
  CHECK(std::fabs(traj.snapshots[2].params.values[0] - 0.72) < 1e-15);
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  Dataset ds = make_synthetic(3, 4, 30, 21);
  Model m = build_mlp({4, 3});
  OptimizerConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.epochs = 2;
  cfg.batch_size = 10;
  FlatParams p0 = init_params(m, 5);
  Trajectory traj = train_sgd(m, p0, ds, cfg);
  for (const Snapshot& s : traj.snapshots) {
    CHECK(s.params.values == p0.values);
  }
}

TEST_CASE("snapshot cadence includes start and final iteration") {
  Dataset ds = make_synthetic(2, 3, 12, 8);
  Model m = build_mlp({3, 2});
  OptimizerConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.batch_size = 1;  // 12 iterations per epoch
  cfg.epochs = 1;

  SUBCASE("aligned cadence: floor(T / every) + 1 snapshots") {
    cfg.checkpoint_every = 4;  // 0, 4, 8, 12
    Trajectory traj = train_sgd(m, init_params(m, 1), ds, cfg);
    CHECK(traj.snapshots.size() == 12 / 4 + 1);
    CHECK(traj.snapshots.back().iteration == 12);
  }

  SUBCASE("unaligned cadence appends the final point") {
    cfg.checkpoint_every = 5;  // 0, 5, 10, 12
    Trajectory traj = train_sgd(m, init_params(m, 1), ds, cfg);
    REQUIRE(traj.snapshots.size() == 4);
    CHECK(traj.snapshots[2].iteration == 10);
    CHECK(traj.snapshots.back().iteration == 12);
  }
}

TEST_CASE("training is bit-deterministic for fixed seeds") {
  Dataset ds = make_synthetic(4, 6, 48, 31);
  Model m = build_mlp({6, 5, 4});
  OptimizerConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.batch_size = 16;
  cfg.epochs = 2;
  cfg.seed = 9;

  Trajectory a = train_sgd(m, init_params(m, 2), ds, cfg);
  Trajectory b = train_sgd(m, init_params(m, 2), ds, cfg);
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
    CHECK(std::memcmp(a.snapshots[i].params.values.data(), b.snapshots[i].params.values.data(),
                      a.snapshots[i].params.size() * sizeof(double)) == 0);
    CHECK(a.snapshots[i].train_loss == b.snapshots[i].train_loss);
  }
}

TEST_CASE("recorded snapshot loss replays exactly") {
  Dataset ds = make_synthetic(3, 5, 30, 17);
  Model m = build_mlp({5, 4, 3});
  OptimizerConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.batch_size = 10;
  cfg.epochs = 2;
  cfg.seed = 4;
  cfg.checkpoint_every = 2;

  Trajectory traj = train_sgd(m, init_params(m, 6), ds, cfg);
  for (const Snapshot& s : traj.snapshots) {
    std::vector<Batch> batches =
        ds.batches(cfg.batch_size, cfg.seed, s.batch_epoch, m.input_sample_shape);
    const double replay =
        forward_loss(m.graph, s.params, batches[static_cast<std::size_t>(s.batch_index)]);
    CHECK(std::fabs(replay - s.train_loss) < 1e-12);
  }
}

TEST_CASE("diverging training aborts with earlier snapshots retained") {
  QuadraticModel q = build_quadratic({1.0}, 1);
  Model m;
  m.graph = q.graph;
  m.input_sample_shape = {1};
  Dataset ds(std::vector<double>{0.0}, {1}, std::vector<int>{0}, 1);

  OptimizerConfig cfg;
  cfg.learning_rate = 1e155;  // theta leaves the representable range quickly
  cfg.batch_size = 1;
  cfg.epochs = 50;
  cfg.checkpoint_every = 1;

  FlatParams theta0(m.layout());
  theta0.values[0] = 1.0;
  Trajectory traj = train_sgd(m, theta0, ds, cfg);
  CHECK(traj.aborted);
  CHECK(!traj.snapshots.empty());
  for (const Snapshot& s : traj.snapshots) CHECK(std::isfinite(s.train_loss));
}

TEST_CASE("optimizer validation rejects bad configurations") {
  Dataset ds = make_synthetic(2, 3, 8, 1);
  Model m = build_mlp({3, 2});
  OptimizerConfig cfg;
  cfg.momentum = 1.0;
  CHECK_THROWS_AS(train_sgd(m, init_params(m, 1), ds, cfg), Error);
  cfg.momentum = 0.9;
  cfg.learning_rate = -0.1;
  CHECK_THROWS_AS(train_sgd(m, init_params(m, 1), ds, cfg), Error);

  // The configuration used throughout the experiments is accepted as-is.
  OptimizerConfig paper;
  paper.learning_rate = 0.001;
  paper.momentum = 0.9;
  paper.batch_size = 256;
  CHECK_NOTHROW(train_sgd(m, init_params(m, 1), ds, paper));
}
