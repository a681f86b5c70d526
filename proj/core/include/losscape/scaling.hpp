// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "losscape/errors.hpp"

namespace losscape {

/// A fixed-size workload parameterized only by its worker count.
using BenchTask = std::function<void(int workers)>;

/// Wall-clock measurements of one task over several worker counts.
struct ScalingRun {
  std::string task;
  std::vector<int> worker_counts;
  int repeats = 0;
  std::vector<std::vector<double>> times;  // [count][repeat] seconds
  std::vector<double> means;
  std::vector<double> stds;  // standard error of the mean time
};

/// Raised when the measured task fails at some worker count; carries the
/// counts that completed so callers can persist partial data.
class PartialScalingError;

/// Runs `task` at every worker count: one discarded warm-up, then `repeats`
/// timed runs on the monotonic clock. The problem size must not depend on the
/// worker count. A task failure aborts the run with the completed counts
/// attached to the error.
ScalingRun measure(const std::string& name, const BenchTask& task,
                   const std::vector<int>& worker_counts, int repeats);

class PartialScalingError : public Error {
 public:
  PartialScalingError(std::string what, ScalingRun partial)
      : Error(Errc::partial_result, std::move(what)), partial_(std::move(partial)) {}

  const ScalingRun& partial() const { return partial_; }

 private:
  ScalingRun partial_;
};

struct SpeedupPoint {
  int p = 1;
  double s = 1.0;
  double sigma_s = 0.0;
};

/// S = mean(T_1) / mean(T_p) with propagated uncertainty
/// sigma_S^2 = (1/T_p)^2 sigma_{T_1}^2 + (T_1/T_p^2)^2 sigma_{T_p}^2.
/// The run must contain a worker count of 1.
std::vector<SpeedupPoint> speedup_with_error(const ScalingRun& run);

struct AmdahlFit {
  double f = 0.0;      // parallelizable fraction in [0, 1]
  double f_std = 0.0;  // from the curvature of the objective at the minimum
  double residual = 0.0;
};

/// Weighted least squares of S(p) = 1 / ((1 - f) + f / p) over f in [0, 1]
/// by golden-section search. Points with sigma_S = 0 anywhere switch the fit
/// to unweighted.
AmdahlFit amdahl_fit(std::span<const SpeedupPoint> points);

/// Model speedup at p workers for a parallel fraction f.
double amdahl_speedup(double f, int p);

nlohmann::json scaling_to_json(const ScalingRun& run, std::span<const SpeedupPoint> points,
                               const AmdahlFit& fit);
void write_scaling_csv(const std::string& path, std::span<const SpeedupPoint> points);

}  // namespace losscape
