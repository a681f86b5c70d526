// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/traj_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "losscape/checkpoint.hpp"
#include "losscape/errors.hpp"

namespace fs = std::filesystem;

namespace losscape {

namespace {

std::string snapshot_filename(std::int64_t iteration) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "iter_%06lld.gvck", static_cast<long long>(iteration));
  return buf;
}

}  // namespace

void save_trajectory(const std::string& dir, const Trajectory& traj, const nlohmann::json& extra) {
  fs::create_directories(dir);

  nlohmann::json snapshots = nlohmann::json::array();
  for (const Snapshot& s : traj.snapshots) {
    const std::string file = snapshot_filename(s.iteration);
    save_checkpoint((fs::path(dir) / file).string(), s.params);
    snapshots.push_back({{"iteration", s.iteration},
                         {"file", file},
                         {"loss", s.train_loss},
                         {"batch_epoch", s.batch_epoch},
                         {"batch_index", s.batch_index}});
  }

  nlohmann::json manifest = {{"format", "losscape-trajectory"},
                             {"version", 1},
                             {"model", traj.model_spec},
                             {"optimizer", traj.optimizer},
                             {"snapshots", snapshots},
                             {"aborted", traj.aborted},
                             {"abort_reason", traj.abort_reason},
                             {"provenance", extra}};
  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::trunc);
  if (!out) throw Error(Errc::missing_input, "cannot create manifest in " + dir);
  out << manifest.dump(2) << "\n";
}

Trajectory load_trajectory(const std::string& dir, nlohmann::json* extra) {
  const fs::path manifest_path = fs::path(dir) / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) {
    throw Error(Errc::missing_input, "no trajectory manifest at " + manifest_path.string());
  }
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::format, manifest_path.string() + ": " + e.what());
  }

  Trajectory traj;
  traj.model_spec = manifest.at("model").get<ModelSpec>();
  traj.optimizer = manifest.at("optimizer").get<OptimizerConfig>();
  traj.aborted = manifest.value("aborted", false);
  traj.abort_reason = manifest.value("abort_reason", std::string());
  if (extra) *extra = manifest.value("provenance", nlohmann::json::object());

  for (const auto& js : manifest.at("snapshots")) {
    Snapshot s;
    s.iteration = js.at("iteration").get<std::int64_t>();
    s.train_loss = js.at("loss").get<double>();
    s.batch_epoch = js.at("batch_epoch").get<int>();
    s.batch_index = js.at("batch_index").get<int>();
    s.params = load_checkpoint((fs::path(dir) / js.at("file").get<std::string>()).string());
    traj.snapshots.push_back(std::move(s));
  }
  if (traj.snapshots.empty()) {
    throw Error(Errc::format, dir + ": trajectory has no snapshots");
  }
  for (std::size_t i = 1; i < traj.snapshots.size(); ++i) {
    if (traj.snapshots[i].iteration <= traj.snapshots[i - 1].iteration) {
      throw Error(Errc::format, dir + ": snapshot iterations are not strictly increasing");
    }
    check_same_layout(traj.snapshots[i].params, traj.snapshots[0].params, "load_trajectory");
  }
  return traj;
}

}  // namespace losscape
