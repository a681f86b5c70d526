// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include "losscape/trainer.hpp"

namespace losscape {

/// Trajectory directory layout: one checkpoint per snapshot named
/// iter_%06d.gvck (with its layout sidecar) plus manifest.json carrying the
/// model spec, optimizer config, per-snapshot losses and any caller-supplied
/// provenance (`extra`, stored verbatim under "provenance").
void save_trajectory(const std::string& dir, const Trajectory& traj,
                     const nlohmann::json& extra = nlohmann::json::object());

/// Loads manifest + all checkpoints; `extra`, when non-null, receives the
/// stored provenance object.
Trajectory load_trajectory(const std::string& dir, nlohmann::json* extra = nullptr);

}  // namespace losscape
