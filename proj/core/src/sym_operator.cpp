// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/sym_operator.hpp"

#include "losscape/errors.hpp"
#include "losscape/parallel.hpp"

namespace losscape {

ExplicitMatrixOperator::ExplicitMatrixOperator(std::size_t n, std::vector<double> row_major)
    : n_(n), a_(std::move(row_major)) {
  if (a_.size() != n_ * n_) {
    throw Error(Errc::config, "ExplicitMatrixOperator: need n*n values");
  }
}

ExplicitMatrixOperator ExplicitMatrixOperator::diagonal(std::vector<double> diag) {
  const std::size_t n = diag.size();
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] = diag[i];
  return ExplicitMatrixOperator(n, std::move(a));
}

void ExplicitMatrixOperator::apply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = a_.data() + i * n_;
    double acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

std::vector<double> data_parallel_hvp(const Graph& model, const FlatParams& params,
                                      const std::vector<Batch>& batches,
                                      std::span<const double> v, int workers) {
  if (batches.empty()) throw Error(Errc::config, "data_parallel_hvp: no batches");
  const std::size_t n = params.values.size();
  if (v.size() != n) throw Error(Errc::layout, "data_parallel_hvp: direction size mismatch");

  Direction dir(params.layout);
  dir.values.assign(v.begin(), v.end());

  // Per-batch products, indexed by batch; worker assignment never affects
  // which slot a batch writes to.
  std::vector<std::vector<double>> parts(batches.size());
  std::vector<double> weights(batches.size(), 0.0);
  parallel_for_chunked(batches.size(), workers, [&](std::size_t bi) {
    FlatParams w = hvp(model, params, batches[bi], dir);
    const double nb = static_cast<double>(batches[bi].size());
    for (double& x : w.values) x *= nb;
    parts[bi] = std::move(w.values);
    weights[bi] = nb;
  });

  double total = 0.0;
  for (double w : weights) total += w;
  std::vector<double> sum = pairwise_sum(std::move(parts));
  for (double& x : sum) x /= total;
  return sum;
}

ModelHessianOperator::ModelHessianOperator(const Graph& model, FlatParams params,
                                           std::vector<Batch> batches, int hvp_workers)
    : model_(model), params_(std::move(params)), batches_(std::move(batches)),
      hvp_workers_(hvp_workers) {
  check_layout(params_, *model_.layout(), "ModelHessianOperator");
  if (batches_.empty()) throw Error(Errc::config, "ModelHessianOperator: no batches");
}

void ModelHessianOperator::apply(std::span<const double> x, std::span<double> y) const {
  std::vector<double> out = data_parallel_hvp(model_, params_, batches_, x, hvp_workers_);
  for (std::size_t i = 0; i < out.size(); ++i) y[i] = out[i];
}

}  // namespace losscape
