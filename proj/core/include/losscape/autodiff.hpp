// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "losscape/batch.hpp"
#include "losscape/graph.hpp"
#include "losscape/params.hpp"

namespace losscape {

/// Mean loss over the batch. Deterministic for fixed inputs.
double forward_loss(const Graph& model, const FlatParams& params, const Batch& batch);

struct LossAndGrad {
  double loss;
  FlatParams grad;
};

/// Loss and gradient in one reverse sweep.
LossAndGrad loss_and_gradient(const Graph& model, const FlatParams& params, const Batch& batch);

FlatParams gradient(const Graph& model, const FlatParams& params, const Batch& batch);

/// Exact Hessian-vector product H*v by differentiating the gradient along v:
/// the forward and backward passes run over dual numbers whose tangents carry
/// d/dr at theta + r*v. Cost is a small constant multiple of one
/// forward/backward sweep; the Hessian is never materialized.
FlatParams hvp(const Graph& model, const FlatParams& params, const Batch& batch,
               const Direction& v);

/// Dense symmetric matrix in row-major storage.
struct DenseSymMatrix {
  std::size_t n = 0;
  std::vector<double> a;  // n*n row-major

  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// Full Hessian assembled column-by-column from hvp on basis vectors and
/// symmetrized as (H + H^T)/2. Refuses problems above `cap` parameters.
DenseSymMatrix dense_hessian_oracle(const Graph& model, const FlatParams& params,
                                    const Batch& batch, std::size_t cap = 2000);

}  // namespace losscape
