// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "losscape/data.hpp"
#include "losscape/models.hpp"
#include "losscape/params.hpp"

namespace losscape {

struct OptimizerConfig {
  double learning_rate = 0.001;
  double momentum = 0.9;
  int batch_size = 256;
  int epochs = 1;
  std::uint64_t seed = 0;  // governs the per-epoch data shuffle
  int checkpoint_every = 1;
};

void to_json(nlohmann::json& j, const OptimizerConfig& c);
void from_json(const nlohmann::json& j, OptimizerConfig& c);

/// Parameters at one recorded iteration, plus the batch identity that
/// produced them so the stored loss can be re-derived exactly.
struct Snapshot {
  std::int64_t iteration = 0;
  FlatParams params;
  double train_loss = 0.0;
  int batch_epoch = 0;
  int batch_index = 0;
};

struct Trajectory {
  ModelSpec model_spec;
  OptimizerConfig optimizer;
  std::vector<Snapshot> snapshots;
  bool aborted = false;
  std::string abort_reason;
};

/// SGD with momentum: u <- mu*u + g; theta <- theta - lr*u, u starting at 0.
/// Snapshots are taken at iteration 0, every checkpoint_every iterations, and
/// at the final iteration. The recorded loss re-evaluates the snapshot's own
/// batch at the updated parameters. A non-finite loss aborts training with
/// all earlier snapshots retained.
Trajectory train_sgd(const Model& model, FlatParams init, const Dataset& ds,
                     const OptimizerConfig& cfg, const ModelSpec* spec = nullptr);

}  // namespace losscape
