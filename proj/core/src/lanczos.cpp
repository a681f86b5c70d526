// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/lanczos.hpp"

#include <cmath>

#include "losscape/errors.hpp"

namespace losscape {

namespace {

double vdot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

constexpr double kBreakdownFactor = 1e-10;

}  // namespace

LanczosResult lanczos(const SymOperator& op, std::span<const double> v0, int m, bool keep_basis) {
  const std::size_t n = op.dim();
  if (v0.size() != n) throw Error(Errc::config, "lanczos: start vector has wrong dimension");
  if (m < 1) throw Error(Errc::config, "lanczos: m must be >= 1");

  LanczosResult result;
  if (static_cast<std::size_t>(m) > n) {
    m = static_cast<int>(n);
    result.clamped = true;
  }

  double v0_norm = 0.0;
  for (double x : v0) v0_norm += x * x;
  v0_norm = std::sqrt(v0_norm);
  if (v0_norm == 0.0) throw Error(Errc::config, "lanczos: start vector is zero");

  std::vector<std::vector<double>> basis;
  basis.reserve(static_cast<std::size_t>(m));
  {
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = v0[i] / v0_norm;
    basis.push_back(std::move(q));
  }

  std::vector<double>& alpha = result.tri.alpha;
  std::vector<double>& beta = result.tri.beta;
  std::vector<double> w(n);
  double alpha_max = 0.0;

  for (int j = 0; j < m; ++j) {
    op.apply(basis[static_cast<std::size_t>(j)], w);
    const double a = vdot(basis[static_cast<std::size_t>(j)], w);
    alpha.push_back(a);
    alpha_max = std::max(alpha_max, std::fabs(a));

    if (j == m - 1) break;  // tridiagonal is complete

    for (std::size_t i = 0; i < n; ++i) w[i] -= a * basis[static_cast<std::size_t>(j)][i];
    if (j > 0) {
      const std::vector<double>& prev = basis[static_cast<std::size_t>(j - 1)];
      const double b = beta[static_cast<std::size_t>(j - 1)];
      for (std::size_t i = 0; i < n; ++i) w[i] -= b * prev[i];
    }
    // Full reorthogonalization; a second pass mops up what the first one
    // loses to cancellation.
    for (int pass = 0; pass < 2; ++pass) {
      for (const std::vector<double>& q : basis) {
        const double proj = vdot(q, w);
        for (std::size_t i = 0; i < n; ++i) w[i] -= proj * q[i];
      }
    }

    double b = std::sqrt(vdot(w, w));
    if (b <= kBreakdownFactor * alpha_max) {
      result.breakdown = true;
      break;
    }
    beta.push_back(b);
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / b;
    basis.push_back(std::move(q));
  }

  if (keep_basis) {
    result.basis = std::move(basis);
  }
  return result;
}

}  // namespace losscape
