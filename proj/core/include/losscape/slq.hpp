// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "losscape/sym_operator.hpp"

namespace losscape {

/// Gauss quadrature rule extracted from one probe's Lanczos run: nodes are
/// the Ritz values, weights the squared first components of the tridiagonal
/// eigenvectors (they sum to 1).
struct ProbeQuadrature {
  std::uint64_t seed = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Smoothed eigenvalue density estimate: the average of per-probe quadrature
/// rules convolved with a Gaussian kernel of width sigma, tabulated on a
/// uniform grid over `support`.
struct SpectrumEstimate {
  std::vector<ProbeQuadrature> probes;
  double sigma = 0.0;
  std::array<double, 2> support{0.0, 0.0};
  std::vector<double> grid;
  std::vector<double> density;
  std::vector<std::uint64_t> failed_probe_seeds;  // excluded from the average
};

struct SlqConfig {
  int k = 10;               // number of random probes
  int m = 80;               // Lanczos steps per probe
  double sigma = 0.0;       // kernel width; <= 0 selects max(0.01 * node range, 1e-6)
  int grid_points = 512;
  std::uint64_t seed = 0;   // probe i draws from seed_mix(seed, "probe", i)
  int workers = 1;          // probes are distributed over workers
  bool rademacher = false;  // +-1 probes instead of Gaussian
};

/// Stochastic Lanczos quadrature. Probe computations are independent; their
/// seeds derive from the probe index alone, so the estimate is bit-identical
/// for any worker count. Probes whose Lanczos run fails are recorded and
/// skipped; if every probe fails the error propagates.
SpectrumEstimate slq_spectrum(const SymOperator& op, const SlqConfig& cfg);

/// Same computation with the probe loop spread over `workers`.
SpectrumEstimate iteration_parallel_slq(const SymOperator& op, SlqConfig cfg, int workers);

/// Pointwise density value from the stored quadrature rules (independent of
/// the tabulated grid).
double density_eval(const SpectrumEstimate& est, double t);

/// Gaussian kernel value f(lambda, t, sigma^2).
double gaussian_kernel(double lambda, double t, double sigma);

void to_json(nlohmann::json& j, const SpectrumEstimate& est);
void from_json(const nlohmann::json& j, SpectrumEstimate& est);

}  // namespace losscape
