// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace losscape {

/// Symmetric tridiagonal matrix: alpha on the diagonal, beta on the first
/// off-diagonal (beta[j] couples rows j and j+1).
struct TridiagonalMatrix {
  std::vector<double> alpha;
  std::vector<double> beta;  // size alpha.size() - 1

  int steps() const { return static_cast<int>(alpha.size()); }
};

/// Full eigendecomposition T = U L U^T, eigenvalues ascending,
/// vectors[i*n + j] = component i of the eigenvector for values[j].
struct TridiagEig {
  std::vector<double> values;
  std::vector<double> vectors;  // n*n row-major

  /// Squared first components (U_{1,j}^2), the Gauss quadrature weights.
  std::vector<double> first_row_squared() const;
};

/// Implicit-QL iteration with accumulated rotations (EISPACK tql2 lineage).
/// O(n^3) including eigenvectors; intended for n up to a few hundred.
TridiagEig tridiag_eig(const TridiagonalMatrix& t);

}  // namespace losscape
