// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "losscape/data.hpp"
#include "losscape/directions.hpp"
#include "losscape/models.hpp"
#include "losscape/slq.hpp"
#include "losscape/trainer.hpp"

namespace losscape {

struct ProjectedPoint {
  double alpha = 0.0;
  double beta = 0.0;
  double residual = 0.0;  // |delta - alpha*phi1 - beta*phi2|
};

/// Least-squares plane coordinates of every snapshot difference
/// theta_i - theta_n via the 2x2 normal equations. The final snapshot maps to
/// (0, 0) exactly. Near-parallel direction pairs are rejected.
std::vector<ProjectedPoint> project_trajectory(const Trajectory& traj, const DirectionPair& dirs);

struct PathPoint {
  double alpha = 0.0;
  double beta = 0.0;
  double z = 0.0;  // loss at the projected plane point
  std::int64_t iteration = 0;
  double residual = 0.0;
  double train_loss = 0.0;  // loss recorded when the snapshot was taken
};

struct LandscapeGrid {
  std::string dirs_provenance;
  bool dirs_normalized = false;
  std::array<double, 2> x_range{0.0, 0.0};
  std::array<double, 2> y_range{0.0, 0.0};
  int n = 0;
  std::vector<double> z;  // n*n row-major, rows indexed by y; NaN marks diverged cells
  std::vector<PathPoint> path;
  int nan_cells = 0;
  std::uint64_t loss_evaluations = 0;  // N^2 grid cells + path points
  double setup_seconds = 0.0;
  double grid_seconds = 0.0;
};

struct GridConfig {
  int n = 50;
  double border = 0.4;      // range extension around the projected trajectory
  double fraction = 0.2;    // deterministic share of training samples per evaluation
  int workers = 1;
  std::uint64_t data_seed = 0;
  int batch_size = 256;
  std::optional<std::array<double, 2>> x_range;  // override trajectory-derived ranges
  std::optional<std::array<double, 2>> y_range;
};

/// Loss surface on the plane through the final snapshot. Cells are assigned
/// to workers in contiguous chunks of the row-major grid and gathered in
/// index order; the data subset and summation order are fixed up front, so z
/// is identical for any worker count. Cells whose evaluation overflows are
/// recorded as NaN instead of aborting the grid.
LandscapeGrid evaluate_grid(const Model& model, const Trajectory& traj, const DirectionPair& dirs,
                            const Dataset& ds, const GridConfig& cfg);

nlohmann::json grid_to_json(const LandscapeGrid& grid);
void write_grid_csv(const std::string& path, const LandscapeGrid& grid);

struct InterpolationPoint {
  double lambda = 0.0;
  FlatParams params;
  double loss = 0.0;
  std::optional<SpectrumEstimate> spectrum;
};

struct InterpolationResult {
  std::vector<InterpolationPoint> points;
};

struct InterpolateConfig {
  int points = 20;
  double fraction = 0.2;
  int workers = 1;
  std::uint64_t data_seed = 0;
  int batch_size = 256;
  std::optional<SlqConfig> spectrum;  // per-point spectra when set
};

/// Losses (and optional spectra) along the straight line
/// theta(lambda) = (1 - lambda) * a + lambda * b, lambda uniform in [0, 1]
/// including both endpoints.
InterpolationResult interpolate_minima(const Model& model, const FlatParams& theta_a,
                                       const FlatParams& theta_b, const Dataset& ds,
                                       const InterpolateConfig& cfg);

nlohmann::json interpolation_to_json(const InterpolationResult& res);

}  // namespace losscape
