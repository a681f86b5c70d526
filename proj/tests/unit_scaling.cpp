// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <thread>

#include "helpers.hpp"
#include "losscape/errors.hpp"
#include "losscape/parallel.hpp"
#include "losscape/scaling.hpp"

using namespace losscape;
using namespace losscape::testing;

namespace {

ScalingRun synthetic_run(std::vector<int> counts, std::vector<double> means,
                         std::vector<double> stds) {
  ScalingRun run;
  run.task = "synthetic";
  run.worker_counts = std::move(counts);
  run.repeats = 2;
  run.means = std::move(means);
  run.stds = std::move(stds);
  for (std::size_t i = 0; i < run.means.size(); ++i) {
    run.times.push_back({run.means[i], run.means[i]});
  }
  return run;
}

std::vector<SpeedupPoint> ideal_points(double f, const std::vector<int>& counts,
                                       double sigma = 1e-3) {
  std::vector<SpeedupPoint> pts;
  for (int p : counts) pts.push_back({p, amdahl_speedup(f, p), sigma});
  return pts;
}

}  // namespace

TEST_CASE("sleeping tasks scale almost perfectly") {
  // Four independent sleeps spread over p workers; sleeps overlap regardless
  // of core count, so the wall clock follows the chunk structure.
  const auto task = [](int workers) {
    parallel_for_chunked(4, workers, [](std::size_t) {
      std::this_thread::sleep_for(std::chrono::milliseconds(120));
    });
  };
  ScalingRun run = measure("sleep", task, {1, 4}, 2);
  std::vector<SpeedupPoint> pts = speedup_with_error(run);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].s == 1.0);
  CHECK(pts[1].s == doctest::Approx(4.0).epsilon(0.10));
}

TEST_CASE("speedup uncertainty follows the propagation formula") {
  SUBCASE("worked example") {
    ScalingRun run = synthetic_run({1, 4}, {10.0, 2.5}, {0.1, 0.05});
    std::vector<SpeedupPoint> pts = speedup_with_error(run);
    CHECK(pts[1].s == doctest::Approx(4.0));
    // sqrt((1/2.5)^2 * 0.01 + (10/6.25)^2 * 0.0025) = sqrt(0.008)
    CHECK(pts[1].sigma_s == doctest::Approx(0.0894427191).epsilon(1e-9));
  }

  SUBCASE("p = 1 reduces to sqrt(2) * sigma / T") {
    ScalingRun run = synthetic_run({1}, {10.0}, {0.1});
    std::vector<SpeedupPoint> pts = speedup_with_error(run);
    CHECK(pts[0].s == 1.0);
    CHECK(pts[0].sigma_s == doctest::Approx(std::sqrt(2.0) * 0.1 / 10.0).epsilon(1e-12));
  }

  SUBCASE("rescaling every time leaves the speedup unchanged") {
    ScalingRun a = synthetic_run({1, 2, 4}, {8.0, 4.4, 2.6}, {0.1, 0.1, 0.1});
    ScalingRun b = synthetic_run({1, 2, 4}, {16.0, 8.8, 5.2}, {0.2, 0.2, 0.2});
    std::vector<SpeedupPoint> pa = speedup_with_error(a);
    std::vector<SpeedupPoint> pb = speedup_with_error(b);
    for (std::size_t i = 0; i < pa.size(); ++i) {
      CHECK(pa[i].s == doctest::Approx(pb[i].s).epsilon(1e-12));
    }
  }

  SUBCASE("zero variance is allowed") {
    ScalingRun run = synthetic_run({1, 2}, {10.0, 5.0}, {0.0, 0.1});
    std::vector<SpeedupPoint> pts = speedup_with_error(run);
    CHECK(pts[1].s == doctest::Approx(2.0));
    CHECK(pts[1].sigma_s == doctest::Approx((10.0 / 25.0) * 0.1).epsilon(1e-9));
  }
}

TEST_CASE("amdahl fit recovers ideal and serial scaling exactly") {
  std::vector<int> counts = {1, 2, 4, 8};

  SUBCASE("perfect scaling means f = 1") {
    AmdahlFit fit = amdahl_fit(ideal_points(1.0, counts));
    CHECK(fit.f == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("flat speedup means f = 0") {
    AmdahlFit fit = amdahl_fit(ideal_points(0.0, counts));
    CHECK(fit.f == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("amdahl round-trip over representative fractions") {
  std::vector<int> counts = {1, 2, 4, 8, 16};
  for (double f : {0.0, 0.25, 0.37, 0.5, 0.9, 0.955, 1.0}) {
    CAPTURE(f);
    AmdahlFit fit = amdahl_fit(ideal_points(f, counts));
    CHECK(std::fabs(fit.f - f) <= 1e-6);
  }
}

TEST_CASE("amdahl fit tolerates one percent multiplicative noise") {
  std::vector<int> counts = {1, 2, 3, 4, 6, 8};
  SplitMix64 rng(15);
  for (double f : {0.37, 0.955}) {
    CAPTURE(f);
    std::vector<SpeedupPoint> pts;
    for (int p : counts) {
      const double s = amdahl_speedup(f, p) * (1.0 + 0.01 * rng.gaussian());
      pts.push_back({p, s, 0.01 * s});
    }
    AmdahlFit fit = amdahl_fit(pts);
    CHECK(std::fabs(fit.f - f) <= 0.02);
    CHECK(fit.f_std < 0.05);
  }
}

TEST_CASE("degenerate uncertainties fall back to the unweighted fit") {
  std::vector<SpeedupPoint> pts = ideal_points(0.8, {1, 2, 4});
  pts[1].sigma_s = 0.0;
  AmdahlFit fit = amdahl_fit(pts);
  CHECK(std::fabs(fit.f - 0.8) <= 1e-6);
}

TEST_CASE("sigma_s shrinks as repeats grow on a fixed-jitter timer") {
  // Deterministic pseudo-timer: the task itself is instantaneous; jitter is
  // injected through the recorded times directly.
  auto make_run = [](int repeats) {
    ScalingRun run;
    run.task = "jitter";
    run.worker_counts = {1, 2};
    run.repeats = repeats;
    SplitMix64 rng(7);
    for (double base : {1.0, 0.5}) {
      std::vector<double> times;
      double mean = 0.0;
      for (int r = 0; r < repeats; ++r) {
        times.push_back(base + 0.01 * rng.gaussian());
        mean += times.back();
      }
      mean /= repeats;
      double var = 0.0;
      for (double t : times) var += (t - mean) * (t - mean);
      var /= (repeats - 1);
      run.times.push_back(times);
      run.means.push_back(mean);
      run.stds.push_back(std::sqrt(var / repeats));
    }
    return run;
  };
  const double few = speedup_with_error(make_run(4))[1].sigma_s;
  const double many = speedup_with_error(make_run(64))[1].sigma_s;
  CHECK(many < few);
}

TEST_CASE("measure validates its configuration") {
  const auto task = [](int) {};
  CHECK_THROWS_AS(measure("x", task, {}, 2), Error);
  CHECK_THROWS_AS(measure("x", task, {1}, 1), Error);
  CHECK_THROWS_AS(measure("x", task, {0}, 2), Error);
  CHECK_THROWS_AS(amdahl_fit(ideal_points(0.5, {2})), Error);
}

TEST_CASE("a failing task aborts the run with partial data attached") {
  const auto task = [](int workers) {
    if (workers == 4) throw Error(Errc::numeric, "boom");
  };
  try {
    measure("flaky", task, {1, 2, 4}, 2);
    FAIL("expected partial-scaling error");
  } catch (const PartialScalingError& e) {
    CHECK(e.code() == Errc::partial_result);
    CHECK(e.partial().worker_counts == std::vector<int>{1, 2});
    CHECK(e.partial().means.size() == 2);
    CHECK(std::string(e.what()).find("boom") != std::string::npos);
  }
}

TEST_CASE("scaling json carries points and the fitted fraction") {
  ScalingRun run = synthetic_run({1, 2}, {4.0, 2.2}, {0.05, 0.05});
  std::vector<SpeedupPoint> pts = speedup_with_error(run);
  AmdahlFit fit = amdahl_fit(pts);
  nlohmann::json j = scaling_to_json(run, pts, fit);
  CHECK(j.at("task") == "synthetic");
  CHECK(j.at("speedup").size() == 2);
  CHECK(j.at("amdahl").contains("f"));
  CHECK(j.at("amdahl").at("f").get<double>() >= 0.0);
}
