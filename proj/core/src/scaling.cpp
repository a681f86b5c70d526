// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/scaling.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "losscape/errors.hpp"

namespace losscape {

namespace {
using Clock = std::chrono::steady_clock;
}

ScalingRun measure(const std::string& name, const BenchTask& task,
                   const std::vector<int>& worker_counts, int repeats) {
  if (worker_counts.empty()) throw Error(Errc::config, "measure: no worker counts");
  if (repeats < 2) throw Error(Errc::config, "measure: need repeats >= 2 for std estimates");

  ScalingRun run;
  run.task = name;
  run.repeats = repeats;
  for (int p : worker_counts) {
    if (p < 1) throw Error(Errc::config, "measure: worker counts must be >= 1");
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(repeats));
    try {
      task(p);  // warm-up, discarded
      for (int r = 0; r < repeats; ++r) {
        const auto t0 = Clock::now();
        task(p);
        times.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
      }
    } catch (const std::exception& e) {
      throw PartialScalingError("measure: task '" + name + "' failed at " + std::to_string(p) +
                                    " workers: " + e.what(),
                                std::move(run));
    }
    run.worker_counts.push_back(p);
    double mean = 0.0;
    for (double t : times) mean += t;
    mean /= static_cast<double>(repeats);
    double var = 0.0;
    for (double t : times) var += (t - mean) * (t - mean);
    var /= static_cast<double>(repeats - 1);
    run.times.push_back(std::move(times));
    run.means.push_back(mean);
    // Uncertainty of the mean, so more repeats tighten the speedup error.
    run.stds.push_back(std::sqrt(var / static_cast<double>(repeats)));
  }
  return run;
}

std::vector<SpeedupPoint> speedup_with_error(const ScalingRun& run) {
  int base = -1;
  for (std::size_t i = 0; i < run.worker_counts.size(); ++i) {
    if (run.worker_counts[i] == 1) {
      base = static_cast<int>(i);
      break;
    }
  }
  if (base < 0) throw Error(Errc::config, "speedup_with_error: run has no single-worker baseline");

  const double t1 = run.means[static_cast<std::size_t>(base)];
  const double s1 = run.stds[static_cast<std::size_t>(base)];
  std::vector<SpeedupPoint> out;
  for (std::size_t i = 0; i < run.worker_counts.size(); ++i) {
    const double tp = run.means[i];
    const double sp = run.stds[i];
    SpeedupPoint pt;
    pt.p = run.worker_counts[i];
    pt.s = t1 / tp;
    pt.sigma_s = std::sqrt((1.0 / tp) * (1.0 / tp) * s1 * s1 +
                           (t1 / (tp * tp)) * (t1 / (tp * tp)) * sp * sp);
    out.push_back(pt);
  }
  return out;
}

double amdahl_speedup(double f, int p) {
  return 1.0 / ((1.0 - f) + f / static_cast<double>(p));
}

namespace {

double fit_objective(double f, std::span<const SpeedupPoint> points, bool weighted) {
  double chi2 = 0.0;
  for (const SpeedupPoint& pt : points) {
    const double r = amdahl_speedup(f, pt.p) - pt.s;
    const double w = weighted ? 1.0 / (pt.sigma_s * pt.sigma_s) : 1.0;
    chi2 += r * r * w;
  }
  return chi2;
}

}  // namespace

AmdahlFit amdahl_fit(std::span<const SpeedupPoint> points) {
  int distinct = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool seen = false;
    for (std::size_t j = 0; j < i; ++j) seen = seen || points[j].p == points[i].p;
    if (!seen) ++distinct;
  }
  if (distinct < 2) throw Error(Errc::config, "amdahl_fit: need at least 2 distinct worker counts");

  bool weighted = true;
  for (const SpeedupPoint& pt : points) {
    if (!(pt.sigma_s > 0.0) || !std::isfinite(pt.sigma_s)) weighted = false;
  }

  // Golden-section search over [0, 1]; the objective is smooth and the
  // interval shrinks far below the reporting precision.
  const double gr = 0.6180339887498949;
  double a = 0.0, b = 1.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = fit_objective(c, points, weighted);
  double fd = fit_objective(d, points, weighted);
  for (int it = 0; it < 120; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = fit_objective(c, points, weighted);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = fit_objective(d, points, weighted);
    }
  }
  double f = 0.5 * (a + b);
  // The boundaries themselves may be the true optimum.
  if (fit_objective(0.0, points, weighted) <= fit_objective(f, points, weighted)) f = 0.0;
  if (fit_objective(1.0, points, weighted) <= fit_objective(f, points, weighted)) f = 1.0;

  AmdahlFit fit;
  fit.f = f;
  fit.residual = fit_objective(f, points, weighted);

  // Curvature of chi^2 at the minimum; one-sided stencil at the boundaries.
  const double h = 1e-4;
  double x0 = f, x1 = f, x2 = f;
  if (f - h < 0.0) {
    x1 = f + h;
    x2 = f + 2 * h;
  } else if (f + h > 1.0) {
    x1 = f - h;
    x2 = f - 2 * h;
  } else {
    x0 = f - h;
    x2 = f + h;
    x1 = f;
  }
  const double y0 = fit_objective(x0, points, weighted);
  const double y1 = fit_objective(x1, points, weighted);
  const double y2 = fit_objective(x2, points, weighted);
  const double curvature = (y0 - 2.0 * y1 + y2) / (h * h);
  fit.f_std = curvature > 0.0 ? std::sqrt(2.0 / curvature) : std::numeric_limits<double>::quiet_NaN();
  return fit;
}

nlohmann::json scaling_to_json(const ScalingRun& run, std::span<const SpeedupPoint> points,
                               const AmdahlFit& fit) {
  nlohmann::json jpoints = nlohmann::json::array();
  for (const SpeedupPoint& pt : points) {
    jpoints.push_back({{"p", pt.p}, {"S", pt.s}, {"sigma_S", pt.sigma_s}});
  }
  return {{"task", run.task},
          {"worker_counts", run.worker_counts},
          {"repeats", run.repeats},
          {"times", run.times},
          {"means", run.means},
          {"stds", run.stds},
          {"speedup", jpoints},
          {"amdahl", {{"f", fit.f}, {"f_std", fit.f_std}, {"residual", fit.residual}}}};
}

void write_scaling_csv(const std::string& path, std::span<const SpeedupPoint> points) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::missing_input, "cannot create csv: " + path);
  out << "p,S,sigma_S\n";
  out.precision(17);
  for (const SpeedupPoint& pt : points) {
    out << pt.p << ',' << pt.s << ',' << pt.sigma_s << '\n';
  }
}

}  // namespace losscape
