// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace losscape {

/// Eigendecomposition of a small dense symmetric matrix by cyclic Jacobi
/// rotations. values ascending; vectors[i*n + j] = component i of the
/// eigenvector for values[j]. Intended for Gram matrices of at most a few
/// hundred rows.
struct SymEig {
  std::vector<double> values;
  std::vector<double> vectors;
};

SymEig jacobi_sym_eig(std::size_t n, std::vector<double> a_row_major);

}  // namespace losscape
