// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "losscape/sym_operator.hpp"
#include "losscape/tridiag.hpp"

namespace losscape {

struct LanczosResult {
  TridiagonalMatrix tri;
  std::vector<std::vector<double>> basis;  // orthonormal Krylov vectors, one per step
  bool breakdown = false;                  // stopped early: beta fell below tolerance
  bool clamped = false;                    // requested steps exceeded the dimension
};

/// Three-term Lanczos recurrence with full reorthogonalization (every new
/// vector is re-projected against the whole basis, twice). Runs at most
/// min(m, dim) steps and stops early when the residual norm drops below
/// 1e-10 * max|alpha|.
LanczosResult lanczos(const SymOperator& op, std::span<const double> v0, int m,
                      bool keep_basis = true);

}  // namespace losscape
