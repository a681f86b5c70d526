// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "losscape/errors.hpp"

namespace losscape {

std::vector<double> TridiagEig::first_row_squared() const {
  const std::size_t n = values.size();
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = vectors[j] * vectors[j];
  return w;
}

TridiagEig tridiag_eig(const TridiagonalMatrix& t) {
  const int n = t.steps();
  if (n < 1) throw Error(Errc::config, "tridiag_eig: empty matrix");
  if (static_cast<int>(t.beta.size()) != n - 1) {
    throw Error(Errc::config, "tridiag_eig: off-diagonal size must be n-1");
  }

  std::vector<double> d = t.alpha;
  std::vector<double> e(t.beta);
  e.push_back(0.0);  // sentinel: e[i] couples rows i and i+1, e[n-1] unused
  std::vector<double> z(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i) * n + i] = 1.0;

  const double eps = std::numeric_limits<double>::epsilon();
  double f = 0.0;
  double tst1 = 0.0;

  for (int l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::fabs(d[l]) + std::fabs(e[l]));
    int m = l;
    while (m < n && std::fabs(e[m]) > eps * tst1) ++m;

    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 50) throw Error(Errc::numeric, "tridiag_eig: QL iteration did not converge");

        // Implicit shift from the leading 2x2.
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (int i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        // QL sweep with accumulated Givens rotations.
        p = d[m];
        double c = 1.0, c2 = c, c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (int i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (int k = 0; k < n; ++k) {
            double* zk = z.data() + static_cast<std::size_t>(k) * n;
            h = zk[i + 1];
            zk[i + 1] = s * zk[i] + c * h;
            zk[i] = c * zk[i] - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::fabs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }

  // Ascending order, columns carried along.
  for (int i = 0; i < n - 1; ++i) {
    int k = i;
    for (int j = i + 1; j < n; ++j) {
      if (d[j] < d[k]) k = j;
    }
    if (k != i) {
      std::swap(d[i], d[k]);
      for (int r = 0; r < n; ++r) {
        std::swap(z[static_cast<std::size_t>(r) * n + i], z[static_cast<std::size_t>(r) * n + k]);
      }
    }
  }

  TridiagEig out;
  out.values = std::move(d);
  out.vectors = std::move(z);
  return out;
}

}  // namespace losscape
