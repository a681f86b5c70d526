// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "losscape/data.hpp"
#include "losscape/graph.hpp"

namespace losscape {

enum class Activation { relu, tanh };
enum class LossKind { softmax_xent, mse };

/// Serializable description of a model; enough to rebuild the graph exactly.
struct ModelSpec {
  std::string kind = "mlp";  // "mlp" | "lenet-mini"
  // mlp
  std::vector<int> layer_sizes = {64, 32, 10};
  Activation activation = Activation::relu;
  // lenet-mini
  int input_hw = 8;
  std::vector<int> channels = {4, 8};
  int fc_hidden = 32;
  bool use_batchnorm = false;
  // shared
  int num_classes = 10;
  LossKind loss = LossKind::softmax_xent;
};

void to_json(nlohmann::json& j, const ModelSpec& s);
void from_json(const nlohmann::json& j, ModelSpec& s);

struct Model {
  Graph graph;
  std::vector<std::int64_t> input_sample_shape;
  std::vector<double> declared_init;  // per-parameter defaults (biases 0, bn scale 1)
  int logits_node = -1;

  const LayoutPtr& layout() const { return graph.layout(); }
};

/// Fully-connected network. Layer sizes include input and output; hidden
/// layers get the chosen activation, the output layer is linear and feeds the
/// loss. Weight layout: one fc_row group per output neuron, one bias group
/// per layer.
Model build_mlp(const std::vector<int>& layer_sizes, Activation activation = Activation::relu,
                LossKind loss = LossKind::softmax_xent);

/// Small convolutional classifier on square single-channel inputs:
/// conv 3x3 -> act -> pool -> conv 2x2 -> act -> pool -> fc -> act -> fc.
/// Kernel sizes are chosen so an 8x8 input is the smallest valid geometry.
/// Every convolution filter is its own conv_filter layout group.
Model build_lenet_mini(int input_hw, const std::vector<int>& channels, int num_classes,
                       int fc_hidden = 32, bool use_batchnorm = false,
                       Activation activation = Activation::relu);

Model build_model(const ModelSpec& spec);

/// He-style uniform initialization for weight groups (bound sqrt(6/fan_in)),
/// declared defaults elsewhere. Deterministic per seed.
FlatParams init_params(const Model& model, std::uint64_t seed);

/// Argmax class predictions; requires a model built with a classification loss.
std::vector<int> predict(const Model& model, const FlatParams& params, const Batch& batch);

/// Fraction of correctly classified samples over the whole dataset.
double accuracy(const Model& model, const FlatParams& params, const Dataset& ds,
                int batch_size = 256);

}  // namespace losscape
