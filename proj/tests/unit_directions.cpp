// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "helpers.hpp"
#include "losscape/autodiff.hpp"
#include "losscape/directions.hpp"
#include "losscape/models.hpp"

using namespace losscape;
using namespace losscape::testing;

namespace {

LayoutPtr flat_layout(std::size_t n) {
  std::vector<ParamGroup> groups;
  groups.push_back({"w.row0", 0, n, GroupKind::fc_row, {static_cast<std::int64_t>(n)}});
  return std::make_shared<const ParamLayout>(std::move(groups));
}

/// Random layout mixing all group kinds; used by the normalization property
/// tests.
LayoutPtr random_layout(std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<ParamGroup> groups;
  std::size_t offset = 0;
  const int n_groups = 3 + static_cast<int>(rng.next() % 6);
  for (int g = 0; g < n_groups; ++g) {
    ParamGroup pg;
    pg.offset = offset;
    pg.name = "g" + std::to_string(g);
    switch (rng.next() % 4) {
      case 0: {
        std::int64_t c = 1 + static_cast<std::int64_t>(rng.next() % 4);
        std::int64_t k = 2 + static_cast<std::int64_t>(rng.next() % 3);
        pg.kind = GroupKind::conv_filter;
        pg.filter_shape = {c, k, k};
        pg.count = static_cast<std::size_t>(c * k * k);
        break;
      }
      case 1: {
        std::int64_t in = 2 + static_cast<std::int64_t>(rng.next() % 8);
        pg.kind = GroupKind::fc_row;
        pg.filter_shape = {in};
        pg.count = static_cast<std::size_t>(in);
        break;
      }
      case 2:
        pg.kind = GroupKind::bias;
        pg.count = 1 + rng.next() % 6;
        break;
      default:
        pg.kind = GroupKind::batchnorm;
        pg.count = 1 + rng.next() % 6;
        break;
    }
    offset += pg.count;
    groups.push_back(std::move(pg));
  }
  return std::make_shared<const ParamLayout>(std::move(groups));
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  return dot(a, b) / (norm2(a) * norm2(b));
}

Trajectory synthetic_trajectory(const LayoutPtr& layout, std::size_t n_snaps, std::uint64_t seed) {
  Trajectory traj;
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < n_snaps; ++i) {
    Snapshot s;
    s.iteration = static_cast<std::int64_t>(i);
    s.params = FlatParams(layout);
    for (double& v : s.params.values) v = rng.gaussian();
    traj.snapshots.push_back(std::move(s));
  }
  return traj;
}

}  // namespace

TEST_CASE("random directions are seeded and near-orthogonal in high dimension") {
  LayoutPtr layout = flat_layout(100000);
  Direction a = random_direction(layout, 42);
  Direction b = random_direction(layout, 42);
  CHECK(a.values == b.values);

  double mean = 0.0;
  for (double v : a.values) mean += v;
  mean /= static_cast<double>(a.values.size());
  CHECK(std::fabs(mean) <= 0.01);

  Direction c = random_direction(layout, 43);
  CHECK(std::fabs(cosine(a.values, c.values)) <= 0.05);
}

TEST_CASE("filter normalization matches the direct two-entry evaluation") {
  // One fc_row group of two entries: d = [3,4], theta = [1,0].
  LayoutPtr layout = flat_layout(2);
  Direction d(std::vector<double>{3.0, 4.0}, layout);
  FlatParams theta(std::vector<double>{1.0, 0.0}, layout);
  Direction n = filter_normalize(d, theta);
  CHECK(std::fabs(n.values[0] - 0.6) < 1e-15);
  CHECK(std::fabs(n.values[1] - 0.8) < 1e-15);
}

TEST_CASE("filter normalization properties hold over random layouts") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    CAPTURE(seed);
    LayoutPtr layout = random_layout(seed);
    FlatParams theta = random_params(layout, seed * 7 + 1);
    Direction d = random_params(layout, seed * 7 + 2);
    Direction n1 = filter_normalize(d, theta);

    SUBCASE("per-group norm equality and batchnorm zeroing") {
      for (const ParamGroup& g : layout->groups()) {
        double dn = 0.0, tn = 0.0;
        for (std::size_t i = 0; i < g.count; ++i) {
          dn += n1.values[g.offset + i] * n1.values[g.offset + i];
          tn += theta.values[g.offset + i] * theta.values[g.offset + i];
        }
        if (g.kind == GroupKind::batchnorm) {
          for (std::size_t i = 0; i < g.count; ++i) CHECK(n1.values[g.offset + i] == 0.0);
        } else {
          CHECK(std::fabs(std::sqrt(dn) - std::sqrt(tn)) < 1e-12 * std::max(1.0, std::sqrt(tn)));
        }
      }
    }

    SUBCASE("idempotence") {
      Direction n2 = filter_normalize(n1, theta);
      CHECK(max_abs_diff(n1.values, n2.values) < 1e-12);
    }

    SUBCASE("scale invariance in the direction argument") {
      for (double c : {0.25, 3.0, 1e8}) {
        Direction scaled = d;
        for (double& v : scaled.values) v *= c;
        Direction ns = filter_normalize(scaled, theta);
        CHECK(max_abs_diff(n1.values, ns.values) < 1e-12);
      }
    }
  }
}

TEST_CASE("filter normalization flags zero direction against nonzero weights") {
  LayoutPtr layout = flat_layout(3);
  Direction d(std::vector<double>{0.0, 0.0, 0.0}, layout);
  FlatParams theta(std::vector<double>{1.0, 2.0, 3.0}, layout);
  try {
    filter_normalize(d, theta);
    FAIL("expected degenerate-direction error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate_direction);
    CHECK(std::string(e.what()).find("w.row0") != std::string::npos);
  }

  SUBCASE("both-zero group passes through as zero") {
    FlatParams zero_theta(std::vector<double>{0.0, 0.0, 0.0}, layout);
    Direction out = filter_normalize(d, zero_theta);
    for (double v : out.values) CHECK(v == 0.0);
  }
}

TEST_CASE("pca resolves an axis-aligned trajectory") {
  const std::size_t dim = 20;
  LayoutPtr layout = flat_layout(dim);
  Trajectory traj;
  // Differences dominated by e1 with a small e2 component; final point at 0.
  const double spread[4] = {3.0, 2.0, 1.0, 0.5};
  for (int i = 0; i < 4; ++i) {
    Snapshot s;
    s.iteration = i;
    s.params = FlatParams(layout);
    s.params.values[0] = spread[i];
    s.params.values[1] = 1e-3 * spread[3 - i];
    traj.snapshots.push_back(std::move(s));
  }
  Snapshot last;
  last.iteration = 4;
  last.params = FlatParams(layout);
  traj.snapshots.push_back(std::move(last));

  DirectionPair pair = pca_directions(traj);
  CHECK(std::fabs(pair.phi1.values[0]) > 0.999);
  CHECK(std::fabs(pair.phi2.values[1]) > 0.999);
  CHECK(std::fabs(dot(pair.phi1.values, pair.phi2.values)) < 1e-10);
  // Deterministic sign: the dominant entry is positive.
  CHECK(pair.phi1.values[0] > 0.0);
  CHECK(pair.phi2.values[1] > 0.0);
}

TEST_CASE("gram-trick pca agrees with a dense svd oracle") {
  const std::size_t dim = 500;
  const std::size_t snaps = 10;
  LayoutPtr layout = flat_layout(dim);
  Trajectory traj = synthetic_trajectory(layout, snaps, 2024);

  DirectionPair pair = pca_directions(traj);

  // Oracle: singular vectors of the explicit difference matrix.
  Eigen::MatrixXd d(dim, snaps - 1);
  const auto& last = traj.snapshots.back().params.values;
  for (std::size_t c = 0; c + 1 < snaps; ++c) {
    for (std::size_t i = 0; i < dim; ++i) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          traj.snapshots[c].params.values[i] - last[i];
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeThinU);
  Eigen::VectorXd u1 = svd.matrixU().col(0);
  Eigen::VectorXd u2 = svd.matrixU().col(1);

  // Principal angles via projection residuals onto span(phi1, phi2).
  auto residual_norm = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd p1 = Eigen::Map<const Eigen::VectorXd>(pair.phi1.values.data(),
                                                           static_cast<Eigen::Index>(dim));
    Eigen::VectorXd p2 = Eigen::Map<const Eigen::VectorXd>(pair.phi2.values.data(),
                                                           static_cast<Eigen::Index>(dim));
    Eigen::VectorXd r = u - p1 * p1.dot(u) - p2 * p2.dot(u);
    return r.norm();
  };
  CHECK(residual_norm(u1) <= 1e-8);  // sin of the principal angle
  CHECK(residual_norm(u2) <= 1e-8);
  CHECK(std::fabs(norm2(pair.phi1.values) - 1.0) < 1e-12);
  CHECK(std::fabs(norm2(pair.phi2.values) - 1.0) < 1e-12);
  CHECK(std::fabs(svd.singularValues()(0) * svd.singularValues()(0)) > 0.0);
}

TEST_CASE("pca rejects rank-deficient trajectories") {
  LayoutPtr layout = flat_layout(10);
  Trajectory traj;
  for (int i = 0; i < 4; ++i) {
    Snapshot s;
    s.iteration = i;
    s.params = FlatParams(layout);
    s.params.values[0] = static_cast<double>(3 - i);  // strictly collinear along e1
    traj.snapshots.push_back(std::move(s));
  }
  try {
    pca_directions(traj);
    FAIL("expected rank-deficiency error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::rank_deficient);
  }

  SUBCASE("fewer than three snapshots is a config error") {
    traj.snapshots.resize(2);
    CHECK_THROWS_AS(pca_directions(traj), Error);
  }
}

TEST_CASE("centered pca option changes the solution only by the mean shift") {
  LayoutPtr layout = flat_layout(50);
  Trajectory traj = synthetic_trajectory(layout, 8, 77);
  DirectionPair plain = pca_directions(traj);
  DirectionPair centered = pca_directions(traj, {.centered = true});
  CHECK(std::fabs(norm2(centered.phi1.values) - 1.0) < 1e-12);
  // They usually differ; both must remain orthonormal pairs.
  CHECK(std::fabs(dot(plain.phi1.values, plain.phi2.values)) < 1e-10);
  CHECK(std::fabs(dot(centered.phi1.values, centered.phi2.values)) < 1e-10);
}

TEST_CASE("eigen directions align with the dominant axes of a diagonal operator") {
  std::vector<double> diag(40, 1.0);
  diag[0] = 5.0;
  diag[1] = 2.0;
  ExplicitMatrixOperator op = ExplicitMatrixOperator::diagonal(diag);
  LayoutPtr layout = flat_layout(40);

  EigenDirections dirs = eigen_directions(op, layout, 2, 15, 7);
  REQUIRE(dirs.vectors.size() == 2);
  CHECK(std::fabs(dirs.values[0] - 5.0) < 1e-8);
  CHECK(std::fabs(dirs.values[1] - 2.0) < 1e-8);
  CHECK(std::fabs(dirs.vectors[0].values[0]) >= 1.0 - 1e-8);
  CHECK(std::fabs(dirs.vectors[1].values[1]) >= 1.0 - 1e-8);
  CHECK(std::fabs(dot(dirs.vectors[0].values, dirs.vectors[1].values)) < 1e-8);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(dirs.residuals[i] <= 1e-4 * std::fabs(dirs.values[i]));
  }
}

TEST_CASE("top model eigenvector matches the dense oracle") {
  Model m = build_mlp({4, 5, 3});
  FlatParams p = random_params(m.layout(), 301, 0.4);
  Batch batch = random_class_batch(8, 4, 3, 302);
  const std::size_t n = p.values.size();

  DenseSymMatrix h = dense_hessian_oracle(m.graph, p, batch);
  Eigen::MatrixXd he(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) he(i, j) = h.at(i, j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(he);
  Eigen::VectorXd top = eig.eigenvectors().col(static_cast<Eigen::Index>(n - 1));

  ModelHessianOperator op(m.graph, p, {batch});
  EigenDirections dirs = eigen_directions(op, m.layout(), 1, static_cast<int>(n), 5);
  REQUIRE(dirs.vectors.size() == 1);
  double cos = 0.0;
  for (std::size_t i = 0; i < n; ++i) cos += top(static_cast<Eigen::Index>(i)) * dirs.vectors[0].values[i];
  CHECK(std::fabs(cos) >= 0.999);
  CHECK(std::fabs(dirs.values[0] - eig.eigenvalues()(static_cast<Eigen::Index>(n - 1))) <
        1e-6 * std::max(1.0, std::fabs(dirs.values[0])));
}

TEST_CASE("early breakdown yields a partial-result error carrying what converged") {
  std::vector<double> diag(30, 1.0);  // identity: the Krylov space is one-dimensional
  ExplicitMatrixOperator op = ExplicitMatrixOperator::diagonal(diag);
  LayoutPtr layout = flat_layout(30);
  try {
    eigen_directions(op, layout, 2, 10, 3);
    FAIL("expected partial-result error");
  } catch (const PartialEigenDirectionsError& e) {
    CHECK(e.code() == Errc::partial_result);
    REQUIRE(e.partial().vectors.size() == 1);
    CHECK(std::fabs(e.partial().values[0] - 1.0) < 1e-10);
  }
}
