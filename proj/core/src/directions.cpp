// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/directions.hpp"

#include <cmath>

#include "losscape/lanczos.hpp"
#include "losscape/rng.hpp"
#include "losscape/sym_eig.hpp"
#include "losscape/tridiag.hpp"

namespace losscape {

const char* to_string(DirectionProvenance p) {
  switch (p) {
    case DirectionProvenance::random: return "random";
    case DirectionProvenance::pca: return "pca";
    case DirectionProvenance::eigen: return "eigen";
    case DirectionProvenance::user: return "user";
  }
  return "unknown";
}

Direction random_direction(const LayoutPtr& layout, std::uint64_t seed) {
  if (!layout) throw Error(Errc::layout, "random_direction: null layout");
  Direction d(layout);
  SplitMix64 rng(seed);
  for (double& x : d.values) x = rng.gaussian();
  return d;
}

Direction filter_normalize(const Direction& d, const FlatParams& theta) {
  check_same_layout(d, theta, "filter_normalize");
  Direction out = d;
  for (const ParamGroup& g : theta.layout->groups()) {
    double* dv = out.values.data() + g.offset;
    if (g.kind == GroupKind::batchnorm) {
      for (std::size_t i = 0; i < g.count; ++i) dv[i] = 0.0;
      continue;
    }
    double dn = 0.0, tn = 0.0;
    for (std::size_t i = 0; i < g.count; ++i) {
      dn += dv[i] * dv[i];
      tn += theta.values[g.offset + i] * theta.values[g.offset + i];
    }
    dn = std::sqrt(dn);
    tn = std::sqrt(tn);
    if (dn == 0.0) {
      if (tn == 0.0) continue;  // both vanish: group stays zero
      throw Error(Errc::degenerate_direction,
                  "filter_normalize: direction is zero on group '" + g.name +
                      "' while parameters are not");
    }
    const double factor = tn / dn;
    for (std::size_t i = 0; i < g.count; ++i) dv[i] *= factor;
  }
  return out;
}

namespace {

/// Largest-|entry| component made positive, first index winning ties.
void fix_sign(std::vector<double>& v) {
  std::size_t arg = 0;
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::fabs(v[i]) > best) {
      best = std::fabs(v[i]);
      arg = i;
    }
  }
  if (v[arg] < 0.0) {
    for (double& x : v) x = -x;
  }
}

}  // namespace

DirectionPair pca_directions(const Trajectory& traj, const PcaOptions& opts) {
  const std::size_t n = traj.snapshots.size();
  if (n < 3) throw Error(Errc::config, "pca_directions: need at least 3 snapshots");
  const FlatParams& last = traj.snapshots.back().params;
  const std::size_t dim = last.values.size();
  const std::size_t cols = n - 1;

  // Difference columns theta_i - theta_n.
  std::vector<std::vector<double>> diff(cols, std::vector<double>(dim));
  for (std::size_t c = 0; c < cols; ++c) {
    const std::vector<double>& snap = traj.snapshots[c].params.values;
    for (std::size_t i = 0; i < dim; ++i) diff[c][i] = snap[i] - last.values[i];
  }
  if (opts.centered) {
    std::vector<double> mean(dim, 0.0);
    for (const auto& col : diff) {
      for (std::size_t i = 0; i < dim; ++i) mean[i] += col[i];
    }
    for (double& x : mean) x /= static_cast<double>(cols);
    for (auto& col : diff) {
      for (std::size_t i = 0; i < dim; ++i) col[i] -= mean[i];
    }
  }

  // Gram matrix D^T D, cols x cols.
  std::vector<double> gram(cols * cols, 0.0);
  for (std::size_t a = 0; a < cols; ++a) {
    for (std::size_t b = a; b < cols; ++b) {
      const double g = dot(diff[a], diff[b]);
      gram[a * cols + b] = g;
      gram[b * cols + a] = g;
    }
  }

  SymEig eig = jacobi_sym_eig(cols, std::move(gram));
  const double l1 = eig.values[cols - 1];
  const double l2 = cols >= 2 ? eig.values[cols - 2] : 0.0;
  // Rank test on singular values: s2 <= 1e-7 * s1 counts as collinear.
  if (l1 <= 0.0 || l2 <= l1 * 1e-14) {
    throw Error(Errc::rank_deficient,
                "pca_directions: trajectory differences span fewer than two directions");
  }

  auto lift = [&](std::size_t which, double lambda) {
    std::vector<double> phi(dim, 0.0);
    for (std::size_t c = 0; c < cols; ++c) {
      const double u = eig.vectors[c * cols + which];
      for (std::size_t i = 0; i < dim; ++i) phi[i] += u * diff[c][i];
    }
    const double inv = 1.0 / std::sqrt(lambda);
    for (double& x : phi) x *= inv;
    // Guard against rounding drift in the lift.
    const double nrm = norm2(phi);
    for (double& x : phi) x /= nrm;
    fix_sign(phi);
    return phi;
  };

  DirectionPair pair;
  pair.provenance = DirectionProvenance::pca;
  pair.phi1 = Direction(lift(cols - 1, l1), last.layout);
  pair.phi2 = Direction(lift(cols - 2, l2), last.layout);
  return pair;
}

EigenDirections eigen_directions(const SymOperator& op, const LayoutPtr& layout, int count, int m,
                                 std::uint64_t seed) {
  if (count < 1) throw Error(Errc::config, "eigen_directions: count must be >= 1");
  if (m < count) throw Error(Errc::config, "eigen_directions: need m >= count");
  if (!layout || layout->total_count() != op.dim()) {
    throw Error(Errc::layout, "eigen_directions: layout does not match operator dimension");
  }

  std::vector<double> v0(op.dim());
  SplitMix64 rng(seed_mix(seed, "eigdir"));
  for (double& x : v0) x = rng.gaussian();

  LanczosResult lr = lanczos(op, v0, m, /*keep_basis=*/true);
  TridiagEig eig = tridiag_eig(lr.tri);
  const int steps = lr.tri.steps();

  EigenDirections out;
  const std::size_t dim = op.dim();
  std::vector<double> applied(dim);
  for (int r = 0; r < count && r < steps; ++r) {
    const int col = steps - 1 - r;  // ascending order: largest last
    const double lambda = eig.values[static_cast<std::size_t>(col)];

    std::vector<double> ritz(dim, 0.0);
    for (int s = 0; s < steps; ++s) {
      const double u = eig.vectors[static_cast<std::size_t>(s) * steps + col];
      const std::vector<double>& q = lr.basis[static_cast<std::size_t>(s)];
      for (std::size_t i = 0; i < dim; ++i) ritz[i] += u * q[i];
    }
    const double nrm = norm2(ritz);
    for (double& x : ritz) x /= nrm;
    fix_sign(ritz);

    op.apply(ritz, applied);
    double res = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double r2 = applied[i] - lambda * ritz[i];
      res += r2 * r2;
    }
    res = std::sqrt(res);
    if (res > 1e-4 * std::max(std::fabs(lambda), 1e-300)) {
      break;  // later Ritz pairs are no better; report what converged
    }
    out.vectors.emplace_back(std::move(ritz), layout);
    out.values.push_back(lambda);
    out.residuals.push_back(res);
  }

  if (static_cast<int>(out.vectors.size()) < count) {
    const std::string what = "eigen_directions: only " + std::to_string(out.vectors.size()) +
                             " of " + std::to_string(count) + " Ritz pairs converged";
    throw PartialEigenDirectionsError(what, std::move(out));
  }
  return out;
}

}  // namespace losscape
