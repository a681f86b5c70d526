// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/models.hpp"

#include <cmath>

#include "losscape/errors.hpp"
#include "losscape/exec.hpp"
#include "losscape/rng.hpp"

namespace losscape {

namespace {

const char* to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }
const char* to_string(LossKind l) { return l == LossKind::softmax_xent ? "softmax_xent" : "mse"; }

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  throw Error(Errc::config, "unknown activation: " + s);
}

LossKind loss_from_string(const std::string& s) {
  if (s == "softmax_xent") return LossKind::softmax_xent;
  if (s == "mse") return LossKind::mse;
  throw Error(Errc::config, "unknown loss: " + s);
}

int apply_activation(GraphBuilder& b, int x, Activation a) {
  return a == Activation::relu ? b.relu(x) : b.tanh_act(x);
}

}  // namespace

void to_json(nlohmann::json& j, const ModelSpec& s) {
  j = {{"kind", s.kind},
       {"layer_sizes", s.layer_sizes},
       {"activation", to_string(s.activation)},
       {"input_hw", s.input_hw},
       {"channels", s.channels},
       {"fc_hidden", s.fc_hidden},
       {"use_batchnorm", s.use_batchnorm},
       {"num_classes", s.num_classes},
       {"loss", to_string(s.loss)}};
}

void from_json(const nlohmann::json& j, ModelSpec& s) {
  s.kind = j.at("kind").get<std::string>();
  s.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  s.activation = activation_from_string(j.at("activation").get<std::string>());
  s.input_hw = j.at("input_hw").get<int>();
  s.channels = j.at("channels").get<std::vector<int>>();
  s.fc_hidden = j.at("fc_hidden").get<int>();
  s.use_batchnorm = j.value("use_batchnorm", false);
  s.num_classes = j.at("num_classes").get<int>();
  s.loss = loss_from_string(j.at("loss").get<std::string>());
}

Model build_mlp(const std::vector<int>& layer_sizes, Activation activation, LossKind loss) {
  if (layer_sizes.size() < 2) {
    throw Error(Errc::config, "build_mlp: need at least input and output sizes");
  }
  for (int s : layer_sizes) {
    if (s < 1) throw Error(Errc::config, "build_mlp: layer sizes must be positive");
  }

  GraphBuilder b;
  int x = b.input({layer_sizes[0]});
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const std::string tag = "fc" + std::to_string(l + 1);
    int w = b.fc_weight(tag + ".w", layer_sizes[l + 1], layer_sizes[l]);
    int bias = b.bias(tag + ".b", layer_sizes[l + 1]);
    x = b.bias_add(b.matmul(x, w), bias);
    if (l + 2 < layer_sizes.size()) x = apply_activation(b, x, activation);
  }

  Model m;
  m.logits_node = x;
  int out = loss == LossKind::softmax_xent ? b.softmax_xent(x) : b.mse(x);
  m.input_sample_shape = {layer_sizes[0]};
  m.declared_init = b.declared_init();
  m.graph = b.finish(out);
  return m;
}

Model build_lenet_mini(int input_hw, const std::vector<int>& channels, int num_classes,
                       int fc_hidden, bool use_batchnorm, Activation activation) {
  if (input_hw < 8) throw Error(Errc::config, "build_lenet_mini: input_hw must be >= 8");
  if (channels.size() != 2 || channels[0] < 1 || channels[1] < 1) {
    throw Error(Errc::config, "build_lenet_mini: expected two positive channel counts");
  }
  if (num_classes < 2 || fc_hidden < 1) {
    throw Error(Errc::config, "build_lenet_mini: bad head configuration");
  }

  const int c1 = channels[0], c2 = channels[1];
  GraphBuilder b;
  int x = b.input({1, input_hw, input_hw});

  auto maybe_bn = [&](int node, int c, const std::string& tag) {
    if (!use_batchnorm) return node;
    int gamma = b.batchnorm_param(tag + ".bn_scale", c, 1.0);
    int beta = b.batchnorm_param(tag + ".bn_shift", c, 0.0);
    return b.batchnorm(node, gamma, beta, std::vector<double>(c, 0.0),
                       std::vector<double>(c, 1.0));
  };

  int w1 = b.conv_weight("conv1.w", c1, 1, 3, 3);
  int b1 = b.bias("conv1.b", c1);
  x = b.bias_add(b.conv2d(x, w1), b1);
  x = maybe_bn(x, c1, "conv1");
  x = apply_activation(b, x, activation);
  x = b.maxpool2(x);

  int w2 = b.conv_weight("conv2.w", c2, c1, 2, 2);
  int b2 = b.bias("conv2.b", c2);
  x = b.bias_add(b.conv2d(x, w2), b2);
  x = maybe_bn(x, c2, "conv2");
  x = apply_activation(b, x, activation);
  x = b.maxpool2(x);

  x = b.flatten(x);
  const std::int64_t flat = b.shape_of(x)[1];

  int w3 = b.fc_weight("fc1.w", fc_hidden, flat);
  int b3 = b.bias("fc1.b", fc_hidden);
  x = apply_activation(b, b.bias_add(b.matmul(x, w3), b3), activation);
  int w4 = b.fc_weight("fc2.w", num_classes, fc_hidden);
  int b4 = b.bias("fc2.b", num_classes);
  x = b.bias_add(b.matmul(x, w4), b4);

  Model m;
  m.logits_node = x;
  int out = b.softmax_xent(x);
  m.input_sample_shape = {1, input_hw, input_hw};
  m.declared_init = b.declared_init();
  m.graph = b.finish(out);
  return m;
}

Model build_model(const ModelSpec& spec) {
  if (spec.kind == "mlp") {
    std::vector<int> sizes = spec.layer_sizes;
    return build_mlp(sizes, spec.activation, spec.loss);
  }
  if (spec.kind == "lenet-mini") {
    return build_lenet_mini(spec.input_hw, spec.channels, spec.num_classes, spec.fc_hidden,
                            spec.use_batchnorm, spec.activation);
  }
  throw Error(Errc::config, "unknown model kind: " + spec.kind);
}

FlatParams init_params(const Model& model, std::uint64_t seed) {
  FlatParams p(model.layout());
  if (model.declared_init.size() == p.values.size()) {
    p.values = model.declared_init;
  }
  SplitMix64 rng(seed_mix(seed, "init"));
  for (const ParamGroup& g : model.layout()->groups()) {
    if (g.kind != GroupKind::conv_filter && g.kind != GroupKind::fc_row) continue;
    const double bound = std::sqrt(6.0 / static_cast<double>(g.count));
    for (std::size_t i = 0; i < g.count; ++i) {
      p.values[g.offset + i] = rng.uniform(-bound, bound);
    }
  }
  return p;
}

std::vector<int> predict(const Model& model, const FlatParams& params, const Batch& batch) {
  if (model.logits_node < 0) throw Error(Errc::config, "predict: model has no logits node");
  check_layout(params, *model.layout(), "predict");
  Workspace<double> ws;
  Batch scored = batch;
  if (scored.labels.empty()) {
    scored.labels.assign(static_cast<std::size_t>(batch.size()), 0);
  }
  forward_pass<double>(model.graph, params.values, scored, ws);
  const auto& logits = ws.val[static_cast<std::size_t>(model.logits_node)];
  const std::int64_t c = model.graph.nodes()[static_cast<std::size_t>(model.logits_node)].shape[1];
  const std::int64_t n = batch.size();
  std::vector<int> pred(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    int best = 0;
    for (std::int64_t j = 1; j < c; ++j) {
      if (logits[i * c + j] > logits[i * c + best]) best = static_cast<int>(j);
    }
    pred[static_cast<std::size_t>(i)] = best;
  }
  return pred;
}

double accuracy(const Model& model, const FlatParams& params, const Dataset& ds, int batch_size) {
  std::vector<std::size_t> order(ds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch_size)) {
    std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(batch_size));
    Batch b = ds.make_batch({order.data() + start, end - start}, model.input_sample_shape);
    std::vector<int> pred = predict(model, params, b);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred[i] == b.labels[i]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(ds.size());
}

}  // namespace losscape
