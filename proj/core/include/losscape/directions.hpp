// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "losscape/errors.hpp"
#include "losscape/params.hpp"
#include "losscape/sym_operator.hpp"
#include "losscape/trainer.hpp"

namespace losscape {

enum class DirectionProvenance { random, pca, eigen, user };

const char* to_string(DirectionProvenance p);

/// Basis pair spanning the visualization plane.
struct DirectionPair {
  Direction phi1;
  Direction phi2;
  DirectionProvenance provenance = DirectionProvenance::random;
  bool normalized = false;
};

/// I.i.d. standard normal entries; deterministic per (layout, seed).
Direction random_direction(const LayoutPtr& layout, std::uint64_t seed);

/// Group-wise rescaling of a direction to the parameter scale: for every
/// conv_filter, fc_row and bias group g, d*_g = d_g * (|theta_g| / |d_g|)
/// (Frobenius norms); batchnorm groups are set to exactly zero. A zero-norm
/// direction group against a nonzero parameter group is an error naming the
/// group; groups where the parameters themselves vanish map to zero.
Direction filter_normalize(const Direction& d, const FlatParams& theta);

struct PcaOptions {
  bool centered = false;  // subtract the mean difference before the Gram matrix
};

/// Top-2 left singular directions of the snapshot difference matrix
/// D = [theta_i - theta_n], i = 1..n-1, computed through the small
/// (n-1)x(n-1) Gram matrix D^T D; the ambient NxN covariance is never formed.
/// Unit-norm, phi1 for the larger singular value, sign fixed so the
/// largest-magnitude entry of each vector is positive.
DirectionPair pca_directions(const Trajectory& traj, const PcaOptions& opts = {});

struct EigenDirections {
  std::vector<Direction> vectors;  // unit-norm Ritz vectors, largest eigenvalue first
  std::vector<double> values;
  std::vector<double> residuals;  // |op(v) - lambda v| per vector
};

/// Carries whatever Ritz pairs converged when fewer than requested did.
class PartialEigenDirectionsError : public Error {
 public:
  PartialEigenDirectionsError(std::string what, EigenDirections partial)
      : Error(Errc::partial_result, std::move(what)), partial_(std::move(partial)) {}

  const EigenDirections& partial() const { return partial_; }

 private:
  EigenDirections partial_;
};

/// Ritz vectors for the `count` algebraically largest eigenvalues from one
/// Lanczos run of m steps with full reorthogonalization. A pair counts as
/// converged when |op(v) - lambda v| <= 1e-4 * |lambda|.
EigenDirections eigen_directions(const SymOperator& op, const LayoutPtr& layout, int count, int m,
                                 std::uint64_t seed);

}  // namespace losscape
