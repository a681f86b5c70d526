// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/landscape.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "losscape/autodiff.hpp"
#include "losscape/errors.hpp"
#include "losscape/parallel.hpp"

namespace losscape {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Sample-weighted mean loss over a fixed batch list, accumulated in batch
/// order.
double subset_loss(const Model& model, const FlatParams& params, const std::vector<Batch>& batches) {
  double weighted = 0.0;
  double total = 0.0;
  for (const Batch& b : batches) {
    weighted += forward_loss(model.graph, params, b) * static_cast<double>(b.size());
    total += static_cast<double>(b.size());
  }
  return weighted / total;
}

std::vector<Batch> subset_batches(const Model& model, const Dataset& ds, double fraction,
                                  std::uint64_t data_seed, int batch_size) {
  std::vector<std::size_t> subset = ds.subset_indices(fraction, data_seed);
  std::vector<Batch> batches;
  for (std::size_t start = 0; start < subset.size(); start += static_cast<std::size_t>(batch_size)) {
    std::size_t end = std::min(subset.size(), start + static_cast<std::size_t>(batch_size));
    batches.push_back(
        ds.make_batch({subset.data() + start, end - start}, model.input_sample_shape));
  }
  return batches;
}

}  // namespace

std::vector<ProjectedPoint> project_trajectory(const Trajectory& traj, const DirectionPair& dirs) {
  if (traj.snapshots.empty()) throw Error(Errc::config, "project_trajectory: empty trajectory");
  const FlatParams& center = traj.snapshots.back().params;
  check_same_layout(dirs.phi1, center, "project_trajectory");
  check_same_layout(dirs.phi2, center, "project_trajectory");

  const std::vector<double>& p1 = dirs.phi1.values;
  const std::vector<double>& p2 = dirs.phi2.values;
  const double g11 = dot(p1, p1);
  const double g12 = dot(p1, p2);
  const double g22 = dot(p2, p2);
  const double det = g11 * g22 - g12 * g12;
  if (std::fabs(det) < 1e-12 * g11 * g22 || g11 == 0.0 || g22 == 0.0) {
    throw Error(Errc::degenerate_direction,
                "project_trajectory: directions are near-parallel (normal equations singular)");
  }

  std::vector<ProjectedPoint> out;
  out.reserve(traj.snapshots.size());
  std::vector<double> delta(center.values.size());
  for (const Snapshot& s : traj.snapshots) {
    const std::vector<double>& th = s.params.values;
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i) {
      delta[i] = th[i] - center.values[i];
      b1 += p1[i] * delta[i];
      b2 += p2[i] * delta[i];
    }
    ProjectedPoint p;
    p.alpha = (g22 * b1 - g12 * b2) / det;
    p.beta = (g11 * b2 - g12 * b1) / det;
    double res = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i) {
      const double r = delta[i] - p.alpha * p1[i] - p.beta * p2[i];
      res += r * r;
    }
    p.residual = std::sqrt(res);
    out.push_back(p);
  }
  return out;
}

LandscapeGrid evaluate_grid(const Model& model, const Trajectory& traj, const DirectionPair& dirs,
                            const Dataset& ds, const GridConfig& cfg) {
  if (cfg.n < 2) throw Error(Errc::config, "evaluate_grid: grid side must be >= 2");
  if (cfg.border < 0.0) throw Error(Errc::config, "evaluate_grid: border must be >= 0");

  const auto t_setup = Clock::now();
  std::vector<ProjectedPoint> proj = project_trajectory(traj, dirs);
  std::vector<Batch> batches = subset_batches(model, ds, cfg.fraction, cfg.data_seed,
                                              cfg.batch_size);

  auto derive_range = [&](auto pick) {
    double lo = pick(proj.front());
    double hi = lo;
    for (const ProjectedPoint& p : proj) {
      lo = std::min(lo, pick(p));
      hi = std::max(hi, pick(p));
    }
    double span = hi - lo;
    if (span <= 0.0) span = 1.0;  // constant trajectory: open a unit window
    return std::array<double, 2>{lo - cfg.border * span, hi + cfg.border * span};
  };
  LandscapeGrid grid;
  grid.dirs_provenance = to_string(dirs.provenance);
  grid.dirs_normalized = dirs.normalized;
  grid.x_range = cfg.x_range ? *cfg.x_range
                             : derive_range([](const ProjectedPoint& p) { return p.alpha; });
  grid.y_range = cfg.y_range ? *cfg.y_range
                             : derive_range([](const ProjectedPoint& p) { return p.beta; });
  grid.n = cfg.n;

  const FlatParams& center = traj.snapshots.back().params;
  const std::size_t dim = center.values.size();
  const std::size_t cells = static_cast<std::size_t>(cfg.n) * static_cast<std::size_t>(cfg.n);
  grid.z.assign(cells, 0.0);
  const double dx = (grid.x_range[1] - grid.x_range[0]) / (cfg.n - 1);
  const double dy = (grid.y_range[1] - grid.y_range[0]) / (cfg.n - 1);

  std::atomic<int> nan_cells{0};
  std::atomic<std::uint64_t> evaluations{0};
  grid.setup_seconds = seconds_since(t_setup);

  const auto t_grid = Clock::now();
  parallel_for_ranges(cells, cfg.workers, [&](ChunkRange chunk) {
    FlatParams point(center.layout);  // per-worker buffer, reused over the chunk
    for (std::size_t cell = chunk.begin; cell < chunk.end; ++cell) {
      const int iy = static_cast<int>(cell) / cfg.n;
      const int ix = static_cast<int>(cell) % cfg.n;
      const double x = grid.x_range[0] + ix * dx;
      const double y = grid.y_range[0] + iy * dy;
      for (std::size_t i = 0; i < dim; ++i) {
        point.values[i] = center.values[i] + x * dirs.phi1.values[i] + y * dirs.phi2.values[i];
      }
      evaluations.fetch_add(1, std::memory_order_relaxed);
      try {
        grid.z[cell] = subset_loss(model, point, batches);
      } catch (const Error& e) {
        if (e.code() != Errc::numeric) throw;
        grid.z[cell] = std::numeric_limits<double>::quiet_NaN();
        nan_cells.fetch_add(1, std::memory_order_relaxed);
      }
    }
  });
  grid.grid_seconds = seconds_since(t_grid);

  grid.path.reserve(proj.size());
  FlatParams point(center.layout);
  for (std::size_t i = 0; i < proj.size(); ++i) {
    PathPoint pp;
    pp.alpha = proj[i].alpha;
    pp.beta = proj[i].beta;
    pp.residual = proj[i].residual;
    pp.iteration = traj.snapshots[i].iteration;
    pp.train_loss = traj.snapshots[i].train_loss;
    for (std::size_t d = 0; d < dim; ++d) {
      point.values[d] =
          center.values[d] + pp.alpha * dirs.phi1.values[d] + pp.beta * dirs.phi2.values[d];
    }
    evaluations.fetch_add(1, std::memory_order_relaxed);
    try {
      pp.z = subset_loss(model, point, batches);
    } catch (const Error& e) {
      if (e.code() != Errc::numeric) throw;
      pp.z = std::numeric_limits<double>::quiet_NaN();
    }
    grid.path.push_back(pp);
  }

  grid.nan_cells = nan_cells.load();
  grid.loss_evaluations = evaluations.load();
  return grid;
}

nlohmann::json grid_to_json(const LandscapeGrid& grid) {
  nlohmann::json path = nlohmann::json::array();
  for (const PathPoint& p : grid.path) {
    path.push_back({{"alpha", p.alpha},
                    {"beta", p.beta},
                    {"z", p.z},
                    {"iter", p.iteration},
                    {"residual", p.residual},
                    {"train_loss", p.train_loss}});
  }
  return {{"dirs_meta",
           {{"provenance", grid.dirs_provenance}, {"normalized", grid.dirs_normalized}}},
          {"x_range", grid.x_range},
          {"y_range", grid.y_range},
          {"N", grid.n},
          {"z", grid.z},
          {"path", path},
          {"nan_cells", grid.nan_cells}};
}

void write_grid_csv(const std::string& path, const LandscapeGrid& grid) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::missing_input, "cannot create csv: " + path);
  out << "x,y,z\n";
  out.precision(17);
  const double dx = (grid.x_range[1] - grid.x_range[0]) / (grid.n - 1);
  const double dy = (grid.y_range[1] - grid.y_range[0]) / (grid.n - 1);
  for (int iy = 0; iy < grid.n; ++iy) {
    for (int ix = 0; ix < grid.n; ++ix) {
      out << grid.x_range[0] + ix * dx << ',' << grid.y_range[0] + iy * dy << ','
          << grid.z[static_cast<std::size_t>(iy) * grid.n + ix] << '\n';
    }
  }
}

InterpolationResult interpolate_minima(const Model& model, const FlatParams& theta_a,
                                       const FlatParams& theta_b, const Dataset& ds,
                                       const InterpolateConfig& cfg) {
  check_same_layout(theta_a, theta_b, "interpolate_minima");
  check_layout(theta_a, *model.layout(), "interpolate_minima");
  if (cfg.points < 2) throw Error(Errc::config, "interpolate_minima: need at least 2 points");

  std::vector<Batch> batches = subset_batches(model, ds, cfg.fraction, cfg.data_seed,
                                              cfg.batch_size);
  InterpolationResult res;
  res.points.resize(static_cast<std::size_t>(cfg.points));
  for (int i = 0; i < cfg.points; ++i) {
    InterpolationPoint& p = res.points[static_cast<std::size_t>(i)];
    p.lambda = static_cast<double>(i) / static_cast<double>(cfg.points - 1);
    p.params = FlatParams(theta_a.layout);
    for (std::size_t d = 0; d < p.params.values.size(); ++d) {
      p.params.values[d] = (1.0 - p.lambda) * theta_a.values[d] + p.lambda * theta_b.values[d];
    }
    p.loss = subset_loss(model, p.params, batches);
    if (cfg.spectrum) {
      ModelHessianOperator op(model.graph, p.params, batches, /*hvp_workers=*/1);
      p.spectrum = iteration_parallel_slq(op, *cfg.spectrum, cfg.workers);
    }
  }
  return res;
}

nlohmann::json interpolation_to_json(const InterpolationResult& res) {
  nlohmann::json points = nlohmann::json::array();
  for (const InterpolationPoint& p : res.points) {
    nlohmann::json jp = {{"lambda", p.lambda}, {"loss", p.loss}};
    if (p.spectrum) jp["spectrum"] = *p.spectrum;
    points.push_back(std::move(jp));
  }
  return {{"points", points}};
}

}  // namespace losscape
