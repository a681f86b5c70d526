// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/slq.hpp"

#include <algorithm>
#include <cmath>

#include "losscape/errors.hpp"
#include "losscape/lanczos.hpp"
#include "losscape/parallel.hpp"
#include "losscape/rng.hpp"
#include "losscape/tridiag.hpp"

namespace losscape {

double gaussian_kernel(double lambda, double t, double sigma) {
  const double d = (t - lambda) / sigma;
  return std::exp(-0.5 * d * d) / (sigma * 2.5066282746310005024);  // sigma * sqrt(2*pi)
}

SpectrumEstimate slq_spectrum(const SymOperator& op, const SlqConfig& cfg) {
  if (cfg.k < 1) throw Error(Errc::config, "slq_spectrum: k must be >= 1");
  if (cfg.m < 1) throw Error(Errc::config, "slq_spectrum: m must be >= 1");
  if (cfg.grid_points < 2) throw Error(Errc::config, "slq_spectrum: grid_points must be >= 2");

  const std::size_t n = op.dim();
  const std::size_t k = static_cast<std::size_t>(cfg.k);

  struct ProbeSlot {
    ProbeQuadrature quad;
    bool ok = false;
    std::string error;
  };
  std::vector<ProbeSlot> slots(k);

  parallel_for_chunked(k, cfg.workers, [&](std::size_t pi) {
    ProbeSlot& slot = slots[pi];
    slot.quad.seed = seed_mix(cfg.seed, "probe", pi);
    try {
      SplitMix64 rng(slot.quad.seed);
      std::vector<double> v0(n);
      for (double& x : v0) x = cfg.rademacher ? rng.rademacher() : rng.gaussian();
      LanczosResult lr = lanczos(op, v0, cfg.m, /*keep_basis=*/false);
      TridiagEig eig = tridiag_eig(lr.tri);
      slot.quad.weights = eig.first_row_squared();
      slot.quad.nodes = std::move(eig.values);
      slot.ok = true;
    } catch (const Error& e) {
      slot.error = e.what();
    }
  });

  SpectrumEstimate est;
  for (ProbeSlot& slot : slots) {
    if (slot.ok) {
      est.probes.push_back(std::move(slot.quad));
    } else {
      est.failed_probe_seeds.push_back(slot.quad.seed);
    }
  }
  if (est.probes.empty()) {
    throw Error(Errc::numeric, "slq_spectrum: every probe failed (" + slots.front().error + ")");
  }

  double lo = est.probes.front().nodes.front();
  double hi = lo;
  for (const ProbeQuadrature& p : est.probes) {
    for (double node : p.nodes) {
      lo = std::min(lo, node);
      hi = std::max(hi, node);
    }
  }
  est.sigma = cfg.sigma > 0.0 ? cfg.sigma : std::max(0.01 * (hi - lo), 1e-6);
  est.support = {lo - 3.0 * est.sigma, hi + 3.0 * est.sigma};

  est.grid.resize(static_cast<std::size_t>(cfg.grid_points));
  est.density.resize(est.grid.size());
  const double step = (est.support[1] - est.support[0]) / (cfg.grid_points - 1);
  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    est.grid[i] = est.support[0] + static_cast<double>(i) * step;
    est.density[i] = density_eval(est, est.grid[i]);
  }
  return est;
}

SpectrumEstimate iteration_parallel_slq(const SymOperator& op, SlqConfig cfg, int workers) {
  cfg.workers = workers;
  return slq_spectrum(op, cfg);
}

double density_eval(const SpectrumEstimate& est, double t) {
  double acc = 0.0;
  for (const ProbeQuadrature& p : est.probes) {
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
      acc += p.weights[i] * gaussian_kernel(p.nodes[i], t, est.sigma);
    }
  }
  return acc / static_cast<double>(est.probes.size());
}

void to_json(nlohmann::json& j, const SpectrumEstimate& est) {
  nlohmann::json probes = nlohmann::json::array();
  for (const ProbeQuadrature& p : est.probes) {
    probes.push_back({{"seed", p.seed}, {"nodes", p.nodes}, {"weights", p.weights}});
  }
  j = {{"probes", probes},
       {"sigma", est.sigma},
       {"support", est.support},
       {"grid", est.grid},
       {"density", est.density}};
  if (!est.failed_probe_seeds.empty()) j["failed_probes"] = est.failed_probe_seeds;
}

void from_json(const nlohmann::json& j, SpectrumEstimate& est) {
  est.probes.clear();
  for (const auto& jp : j.at("probes")) {
    ProbeQuadrature p;
    p.seed = jp.at("seed").get<std::uint64_t>();
    p.nodes = jp.at("nodes").get<std::vector<double>>();
    p.weights = jp.at("weights").get<std::vector<double>>();
    est.probes.push_back(std::move(p));
  }
  est.sigma = j.at("sigma").get<double>();
  auto support = j.at("support").get<std::vector<double>>();
  est.support = {support.at(0), support.at(1)};
  est.grid = j.at("grid").get<std::vector<double>>();
  est.density = j.at("density").get<std::vector<double>>();
  est.failed_probe_seeds =
      j.value("failed_probes", std::vector<std::uint64_t>());
}

}  // namespace losscape
