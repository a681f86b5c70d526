// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "losscape/autodiff.hpp"
#include "losscape/batch.hpp"
#include "losscape/graph.hpp"
#include "losscape/params.hpp"
#include "losscape/rng.hpp"

namespace losscape::testing {

/// |a - b| <= rtol * max(|a|, |b|, floor)
inline bool close(double a, double b, double rtol, double floor = 1.0) {
  return std::fabs(a - b) <= rtol * std::max({std::fabs(a), std::fabs(b), floor});
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

/// Batch for parameter-only graphs (the values are never consumed).
inline Batch dummy_batch() {
  Batch b;
  b.inputs = Tensor({1, 1}, {0.0});
  return b;
}

/// Loss graph 0.5 * theta^T A theta for an explicit symmetric matrix A.
struct QuadraticModel {
  Graph graph;
  LayoutPtr layout;
};

inline QuadraticModel build_quadratic(const std::vector<double>& a_row_major, std::size_t n) {
  GraphBuilder b;
  int theta = b.fc_weight("theta", 1, static_cast<std::int64_t>(n));
  int a = b.constant(Tensor({static_cast<std::int64_t>(n), static_cast<std::int64_t>(n)},
                            a_row_major));
  int z = b.matmul(theta, a);  // theta * A^T = theta^T A for symmetric A
  int loss = b.scale(b.sum(b.mul(z, theta)), 0.5);
  QuadraticModel q;
  q.graph = b.finish(loss);
  q.layout = q.graph.layout();
  return q;
}

inline std::vector<double> random_symmetric(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  SplitMix64 rng(seed);
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double v = scale * rng.gaussian();
      a[i * n + j] = v;
      a[j * n + i] = v;
    }
  }
  return a;
}

inline FlatParams random_params(const LayoutPtr& layout, std::uint64_t seed, double scale = 0.5) {
  FlatParams p(layout);
  SplitMix64 rng(seed);
  for (double& x : p.values) x = scale * rng.gaussian();
  return p;
}

/// Central-difference gradient of the loss; the straight-line oracle for
/// reverse mode.
inline std::vector<double> fd_gradient(const Graph& g, const FlatParams& params, const Batch& batch,
                                       double h = 1e-5) {
  std::vector<double> grad(params.values.size());
  FlatParams shifted = params;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double saved = shifted.values[i];
    shifted.values[i] = saved + h;
    const double up = forward_loss(g, shifted, batch);
    shifted.values[i] = saved - h;
    const double down = forward_loss(g, shifted, batch);
    shifted.values[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

/// Central-difference Hessian from gradients; the oracle for hvp columns.
inline std::vector<double> fd_hessian(const Graph& g, const FlatParams& params, const Batch& batch,
                                      double h = 1e-5) {
  const std::size_t n = params.values.size();
  std::vector<double> hess(n * n);
  FlatParams shifted = params;
  for (std::size_t j = 0; j < n; ++j) {
    const double saved = shifted.values[j];
    shifted.values[j] = saved + h;
    FlatParams up = gradient(g, shifted, batch);
    shifted.values[j] = saved - h;
    FlatParams down = gradient(g, shifted, batch);
    shifted.values[j] = saved;
    for (std::size_t i = 0; i < n; ++i) {
      hess[i * n + j] = (up.values[i] - down.values[i]) / (2.0 * h);
    }
  }
  return hess;
}

inline Batch random_class_batch(std::int64_t b, std::int64_t dim, int classes,
                                std::uint64_t seed) {
  SplitMix64 rng(seed);
  Batch batch;
  batch.inputs = Tensor({b, dim});
  for (double& v : batch.inputs.values) v = rng.gaussian();
  batch.labels.resize(static_cast<std::size_t>(b));
  for (int& y : batch.labels) y = static_cast<int>(rng.next() % static_cast<std::uint64_t>(classes));
  return batch;
}

}  // namespace losscape::testing
