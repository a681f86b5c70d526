// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/trainer.hpp"

#include "losscape/autodiff.hpp"
#include "losscape/errors.hpp"

namespace losscape {

void to_json(nlohmann::json& j, const OptimizerConfig& c) {
  j = {{"learning_rate", c.learning_rate}, {"momentum", c.momentum},
       {"batch_size", c.batch_size},       {"epochs", c.epochs},
       {"seed", c.seed},                   {"checkpoint_every", c.checkpoint_every}};
}

void from_json(const nlohmann::json& j, OptimizerConfig& c) {
  c.learning_rate = j.at("learning_rate").get<double>();
  c.momentum = j.at("momentum").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.checkpoint_every = j.at("checkpoint_every").get<int>();
}

namespace {

void validate(const OptimizerConfig& cfg) {
  if (cfg.learning_rate < 0.0) throw Error(Errc::config, "train_sgd: learning_rate must be >= 0");
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) {
    throw Error(Errc::config, "train_sgd: momentum must be in [0, 1)");
  }
  if (cfg.batch_size < 1) throw Error(Errc::config, "train_sgd: batch_size must be >= 1");
  if (cfg.epochs < 1) throw Error(Errc::config, "train_sgd: epochs must be >= 1");
  if (cfg.checkpoint_every < 1) {
    throw Error(Errc::config, "train_sgd: checkpoint_every must be >= 1");
  }
}

}  // namespace

Trajectory train_sgd(const Model& model, FlatParams init, const Dataset& ds,
                     const OptimizerConfig& cfg, const ModelSpec* spec) {
  validate(cfg);
  check_layout(init, *model.layout(), "train_sgd");

  Trajectory traj;
  traj.optimizer = cfg;
  if (spec) traj.model_spec = *spec;

  FlatParams theta = std::move(init);
  std::vector<double> velocity(theta.values.size(), 0.0);

  auto record = [&](std::int64_t iteration, const Batch& batch, int epoch, int index) {
    Snapshot s;
    s.iteration = iteration;
    s.params = theta;
    s.train_loss = forward_loss(model.graph, theta, batch);
    s.batch_epoch = epoch;
    s.batch_index = index;
    traj.snapshots.push_back(std::move(s));
  };

  std::int64_t iter = 0;
  try {
    {
      std::vector<Batch> first = ds.batches(cfg.batch_size, cfg.seed, 0, model.input_sample_shape);
      record(0, first.front(), 0, 0);
    }
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::vector<Batch> batches =
          ds.batches(cfg.batch_size, cfg.seed, epoch, model.input_sample_shape);
      for (std::size_t bi = 0; bi < batches.size(); ++bi) {
        LossAndGrad lg = loss_and_gradient(model.graph, theta, batches[bi]);
        for (std::size_t i = 0; i < theta.values.size(); ++i) {
          velocity[i] = cfg.momentum * velocity[i] + lg.grad.values[i];
          theta.values[i] -= cfg.learning_rate * velocity[i];
        }
        ++iter;
        const bool last = epoch == cfg.epochs - 1 && bi == batches.size() - 1;
        if (iter % cfg.checkpoint_every == 0 || last) {
          record(iter, batches[bi], epoch, static_cast<int>(bi));
        }
      }
    }
  } catch (const Error& e) {
    if (e.code() != Errc::numeric) throw;
    traj.aborted = true;
    traj.abort_reason = e.what();
  }
  return traj;
}

}  // namespace losscape
