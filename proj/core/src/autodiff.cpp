// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/autodiff.hpp"

#include <cmath>

#include "losscape/exec.hpp"

namespace losscape {

namespace {

// Each worker thread keeps its scratch buffers alive across evaluations;
// repeated passes then reuse capacity instead of faulting in fresh pages.
Workspace<double>& scratch_real() {
  static thread_local Workspace<double> ws;
  return ws;
}

Workspace<Dual>& scratch_dual() {
  static thread_local Workspace<Dual> ws;
  return ws;
}

}  // namespace

double forward_loss(const Graph& model, const FlatParams& params, const Batch& batch) {
  check_layout(params, *model.layout(), "forward_loss");
  return forward_pass<double>(model, params.values, batch, scratch_real());
}

LossAndGrad loss_and_gradient(const Graph& model, const FlatParams& params, const Batch& batch) {
  check_layout(params, *model.layout(), "gradient");
  Workspace<double>& ws = scratch_real();
  double loss = forward_pass<double>(model, params.values, batch, ws);
  FlatParams grad(params.layout);
  backward_pass<double>(model, params.values, batch, ws, grad.values);
  return {loss, std::move(grad)};
}

FlatParams gradient(const Graph& model, const FlatParams& params, const Batch& batch) {
  return loss_and_gradient(model, params, batch).grad;
}

FlatParams hvp(const Graph& model, const FlatParams& params, const Batch& batch,
               const Direction& v) {
  check_layout(params, *model.layout(), "hvp");
  check_same_layout(params, v, "hvp");

  const std::size_t n = params.values.size();
  static thread_local std::vector<Dual> theta;
  static thread_local std::vector<Dual> grad;
  theta.resize(n);
  for (std::size_t i = 0; i < n; ++i) theta[i] = Dual(params.values[i], v.values[i]);
  grad.assign(n, Dual(0.0, 0.0));

  Workspace<Dual>& ws = scratch_dual();
  forward_pass<Dual>(model, theta, batch, ws);
  backward_pass<Dual>(model, theta, batch, ws, grad);

  FlatParams out(params.layout);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(grad[i].t)) throw Error(Errc::numeric, "hvp: non-finite result");
    out.values[i] = grad[i].t;  // tangent of the gradient = H*v
  }
  return out;
}

DenseSymMatrix dense_hessian_oracle(const Graph& model, const FlatParams& params,
                                    const Batch& batch, std::size_t cap) {
  check_layout(params, *model.layout(), "dense_hessian_oracle");
  const std::size_t n = params.values.size();
  if (n > cap) {
    throw Error(Errc::oracle_cap, "dense_hessian_oracle: " + std::to_string(n) +
                                      " parameters exceed cap " + std::to_string(cap));
  }
  DenseSymMatrix h;
  h.n = n;
  h.a.assign(n * n, 0.0);
  Direction e(params.layout);
  for (std::size_t j = 0; j < n; ++j) {
    e.values[j] = 1.0;
    FlatParams col = hvp(model, params, batch, e);
    for (std::size_t i = 0; i < n; ++i) h.at(i, j) = col.values[i];
    e.values[j] = 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.5 * (h.at(i, j) + h.at(j, i));
      h.at(i, j) = s;
      h.at(j, i) = s;
    }
  }
  return h;
}

}  // namespace losscape
