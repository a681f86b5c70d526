// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "losscape/autodiff.hpp"
#include "losscape/batch.hpp"
#include "losscape/graph.hpp"
#include "losscape/params.hpp"

namespace losscape {

/// Symmetric linear operator accessed only through matrix-vector products.
/// apply() must be safe for concurrent calls; implementations keep all state
/// read-only and allocate scratch per call.
class SymOperator {
 public:
  virtual ~SymOperator() = default;
  virtual std::size_t dim() const = 0;
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
};

inline std::vector<double> apply(const SymOperator& op, std::span<const double> x) {
  std::vector<double> y(op.dim(), 0.0);
  op.apply(x, y);
  return y;
}

/// Dense symmetric matrix operator (testing and explicit-matrix inputs).
class ExplicitMatrixOperator final : public SymOperator {
 public:
  ExplicitMatrixOperator(std::size_t n, std::vector<double> row_major);
  static ExplicitMatrixOperator diagonal(std::vector<double> diag);

  std::size_t dim() const override { return n_; }
  void apply(std::span<const double> x, std::span<double> y) const override;

 private:
  std::size_t n_;
  std::vector<double> a_;
};

/// Mean Hessian-vector product over `batches`, weighted by batch size. Each
/// per-batch product may be computed by a different worker; the combination
/// runs over a fixed pairwise tree in batch order, so the result is
/// bit-identical for any worker count.
std::vector<double> data_parallel_hvp(const Graph& model, const FlatParams& params,
                                      const std::vector<Batch>& batches,
                                      std::span<const double> v, int workers);

/// Loss Hessian of a model at fixed parameters over a fixed batch partition.
class ModelHessianOperator final : public SymOperator {
 public:
  ModelHessianOperator(const Graph& model, FlatParams params, std::vector<Batch> batches,
                       int hvp_workers = 1);

  std::size_t dim() const override { return params_.values.size(); }
  void apply(std::span<const double> x, std::span<double> y) const override;

  const FlatParams& params() const { return params_; }

 private:
  const Graph& model_;
  FlatParams params_;
  std::vector<Batch> batches_;
  int hvp_workers_;
};

}  // namespace losscape
