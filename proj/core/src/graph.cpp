// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/graph.hpp"

#include "losscape/errors.hpp"

namespace losscape {

namespace {

bool batched(const std::vector<std::int64_t>& shape) { return !shape.empty() && shape[0] == -1; }

std::string shape_str(const std::vector<std::int64_t>& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

}  // namespace

int GraphBuilder::add_node(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

const Node& GraphBuilder::at(int id) const {
  if (id < 0 || id >= static_cast<int>(nodes_.size())) {
    throw Error(Errc::config, "graph builder: node id out of range");
  }
  return nodes_[static_cast<std::size_t>(id)];
}

int GraphBuilder::input(std::vector<std::int64_t> sample_shape) {
  Node n;
  n.op = OpKind::input;
  n.shape.push_back(-1);
  for (std::int64_t d : sample_shape) n.shape.push_back(d);
  return add_node(std::move(n));
}

int GraphBuilder::constant(Tensor value) {
  if (!value.consistent()) throw Error(Errc::config, "constant tensor shape/value mismatch");
  Node n;
  n.op = OpKind::constant;
  n.shape = value.shape;
  n.const_values = std::move(value.values);
  return add_node(std::move(n));
}

int GraphBuilder::add_param(const std::string& name, GroupKind, std::vector<ParamGroup> groups,
                            std::vector<std::int64_t> node_shape, double init) {
  Node n;
  n.op = OpKind::param;
  n.shape = std::move(node_shape);
  n.param_offset = param_cursor_;
  n.param_count = 0;
  for (ParamGroup& g : groups) {
    g.offset = param_cursor_;
    param_cursor_ += g.count;
    n.param_count += g.count;
    groups_.push_back(std::move(g));
  }
  declared_init_.resize(param_cursor_, init);
  (void)name;
  return add_node(std::move(n));
}

int GraphBuilder::fc_weight(const std::string& name, std::int64_t out, std::int64_t in) {
  if (out < 1 || in < 1) throw Error(Errc::config, "fc_weight: dimensions must be positive");
  std::vector<ParamGroup> groups;
  for (std::int64_t r = 0; r < out; ++r) {
    ParamGroup g;
    g.name = name + ".row" + std::to_string(r);
    g.count = static_cast<std::size_t>(in);
    g.kind = GroupKind::fc_row;
    g.filter_shape = {in};
    groups.push_back(std::move(g));
  }
  return add_param(name, GroupKind::fc_row, std::move(groups), {out, in}, 0.0);
}

int GraphBuilder::conv_weight(const std::string& name, int out_c, int in_c, int kh, int kw) {
  if (out_c < 1 || in_c < 1 || kh < 1 || kw < 1) {
    throw Error(Errc::config, "conv_weight: dimensions must be positive");
  }
  std::vector<ParamGroup> groups;
  for (int f = 0; f < out_c; ++f) {
    ParamGroup g;
    g.name = name + ".filter" + std::to_string(f);
    g.count = static_cast<std::size_t>(in_c) * kh * kw;
    g.kind = GroupKind::conv_filter;
    g.filter_shape = {in_c, kh, kw};
    groups.push_back(std::move(g));
  }
  return add_param(name, GroupKind::conv_filter, std::move(groups), {out_c, in_c, kh, kw}, 0.0);
}

int GraphBuilder::bias(const std::string& name, std::int64_t n) {
  if (n < 1) throw Error(Errc::config, "bias: size must be positive");
  ParamGroup g;
  g.name = name;
  g.count = static_cast<std::size_t>(n);
  g.kind = GroupKind::bias;
  return add_param(name, GroupKind::bias, {std::move(g)}, {n}, 0.0);
}

int GraphBuilder::batchnorm_param(const std::string& name, std::int64_t c, double init) {
  if (c < 1) throw Error(Errc::config, "batchnorm_param: size must be positive");
  ParamGroup g;
  g.name = name;
  g.count = static_cast<std::size_t>(c);
  g.kind = GroupKind::batchnorm;
  return add_param(name, GroupKind::batchnorm, {std::move(g)}, {c}, init);
}

int GraphBuilder::matmul(int x, int w) {
  const Node& xn = at(x);
  const Node& wn = at(w);
  if (xn.shape.size() != 2) {
    throw Error(Errc::config, "matmul: expected 2-d input, got " + shape_str(xn.shape));
  }
  if (wn.shape.size() != 2) {
    throw Error(Errc::config, "matmul: expected 2-d weight, got " + shape_str(wn.shape));
  }
  if (xn.shape[1] != wn.shape[1]) {
    throw Error(Errc::config, "matmul: inner dimensions disagree: " + shape_str(xn.shape) + " vs " +
                                  shape_str(wn.shape));
  }
  Node n;
  n.op = OpKind::matmul;
  n.inputs = {x, w};
  n.shape = {xn.shape[0], wn.shape[0]};  // leading dim may be -1 (batch) or fixed
  return add_node(std::move(n));
}

int GraphBuilder::conv2d(int x, int w) {
  const Node& xn = at(x);
  const Node& wn = at(w);
  if (!batched(xn.shape) || xn.shape.size() != 4) {
    throw Error(Errc::config, "conv2d: expected input [B,C,H,W], got " + shape_str(xn.shape));
  }
  if (wn.shape.size() != 4) {
    throw Error(Errc::config, "conv2d: expected weight [O,I,kh,kw], got " + shape_str(wn.shape));
  }
  std::int64_t out_c = wn.shape[0], in_c = wn.shape[1], kh = wn.shape[2], kw = wn.shape[3];
  if (xn.shape[1] != in_c) throw Error(Errc::config, "conv2d: channel mismatch");
  std::int64_t oh = xn.shape[2] - kh + 1;
  std::int64_t ow = xn.shape[3] - kw + 1;
  if (oh < 1 || ow < 1) {
    throw Error(Errc::config, "conv2d: spatial output would shrink below 1 (" +
                                  std::to_string(oh) + "x" + std::to_string(ow) + ")");
  }
  Node n;
  n.op = OpKind::conv2d;
  n.inputs = {x, w};
  n.shape = {-1, out_c, oh, ow};
  n.conv_out_c = static_cast<int>(out_c);
  n.conv_in_c = static_cast<int>(in_c);
  n.conv_kh = static_cast<int>(kh);
  n.conv_kw = static_cast<int>(kw);
  return add_node(std::move(n));
}

int GraphBuilder::maxpool2(int x) {
  const Node& xn = at(x);
  if (!batched(xn.shape) || xn.shape.size() != 4) {
    throw Error(Errc::config, "maxpool2: expected input [B,C,H,W], got " + shape_str(xn.shape));
  }
  std::int64_t oh = xn.shape[2] / 2;
  std::int64_t ow = xn.shape[3] / 2;
  if (oh < 1 || ow < 1) {
    throw Error(Errc::config, "maxpool2: spatial output would shrink below 1");
  }
  Node n;
  n.op = OpKind::maxpool2;
  n.inputs = {x};
  n.shape = {-1, xn.shape[1], oh, ow};
  return add_node(std::move(n));
}

int GraphBuilder::flatten(int x) {
  const Node& xn = at(x);
  if (!batched(xn.shape) || xn.shape.size() < 2) {
    throw Error(Errc::config, "flatten: expected batched input, got " + shape_str(xn.shape));
  }
  std::int64_t d = 1;
  for (std::size_t i = 1; i < xn.shape.size(); ++i) d *= xn.shape[i];
  Node n;
  n.op = OpKind::flatten;
  n.inputs = {x};
  n.shape = {-1, d};
  return add_node(std::move(n));
}

int GraphBuilder::relu(int x) {
  Node n;
  n.op = OpKind::relu;
  n.inputs = {x};
  n.shape = at(x).shape;
  return add_node(std::move(n));
}

int GraphBuilder::tanh_act(int x) {
  Node n;
  n.op = OpKind::tanh_act;
  n.inputs = {x};
  n.shape = at(x).shape;
  return add_node(std::move(n));
}

int GraphBuilder::bias_add(int x, int b) {
  const Node& xn = at(x);
  const Node& bn = at(b);
  if (bn.shape.size() != 1) throw Error(Errc::config, "bias_add: bias must be 1-d");
  bool fc = xn.shape.size() == 2 && xn.shape[1] == bn.shape[0];
  bool conv = xn.shape.size() == 4 && xn.shape[1] == bn.shape[0];
  if (!batched(xn.shape) || (!fc && !conv)) {
    throw Error(Errc::config, "bias_add: bias " + shape_str(bn.shape) +
                                  " does not broadcast over " + shape_str(xn.shape));
  }
  Node n;
  n.op = OpKind::bias_add;
  n.inputs = {x, b};
  n.shape = xn.shape;
  return add_node(std::move(n));
}

int GraphBuilder::batchnorm(int x, int gamma, int beta, std::vector<double> running_mean,
                            std::vector<double> running_var, double eps) {
  const Node& xn = at(x);
  if (!batched(xn.shape) || (xn.shape.size() != 2 && xn.shape.size() != 4)) {
    throw Error(Errc::config, "batchnorm: expected [B,C] or [B,C,H,W] input");
  }
  std::size_t c = static_cast<std::size_t>(xn.shape[1]);
  if (at(gamma).shape != std::vector<std::int64_t>{xn.shape[1]} ||
      at(beta).shape != std::vector<std::int64_t>{xn.shape[1]}) {
    throw Error(Errc::config, "batchnorm: scale/shift size must equal channel count");
  }
  if (running_mean.size() != c || running_var.size() != c) {
    throw Error(Errc::config, "batchnorm: running statistics size must equal channel count");
  }
  Node n;
  n.op = OpKind::batchnorm;
  n.inputs = {x, gamma, beta};
  n.shape = xn.shape;
  n.const_values = std::move(running_mean);
  n.const_values2 = std::move(running_var);
  n.scalar = eps;
  return add_node(std::move(n));
}

int GraphBuilder::softmax_xent(int logits) {
  const Node& xn = at(logits);
  if (!batched(xn.shape) || xn.shape.size() != 2) {
    throw Error(Errc::config, "softmax_xent: expected logits [B,C]");
  }
  Node n;
  n.op = OpKind::softmax_xent;
  n.inputs = {logits};
  n.shape = {};  // scalar
  return add_node(std::move(n));
}

int GraphBuilder::mse(int pred) {
  const Node& xn = at(pred);
  if (!batched(xn.shape)) throw Error(Errc::config, "mse: expected batched prediction");
  Node n;
  n.op = OpKind::mse;
  n.inputs = {pred};
  n.shape = {};
  return add_node(std::move(n));
}

int GraphBuilder::mul(int a, int b) {
  if (at(a).shape != at(b).shape) throw Error(Errc::config, "mul: shapes differ");
  Node n;
  n.op = OpKind::mul;
  n.inputs = {a, b};
  n.shape = at(a).shape;
  return add_node(std::move(n));
}

int GraphBuilder::sum(int x) {
  Node n;
  n.op = OpKind::sum;
  n.inputs = {x};
  n.shape = {};
  return add_node(std::move(n));
}

int GraphBuilder::scale(int x, double factor) {
  Node n;
  n.op = OpKind::scale;
  n.inputs = {x};
  n.shape = at(x).shape;
  n.scalar = factor;
  return add_node(std::move(n));
}

const std::vector<std::int64_t>& GraphBuilder::shape_of(int id) const { return at(id).shape; }

Graph GraphBuilder::finish(int output) {
  const Node& out = at(output);
  if (!out.shape.empty()) {
    throw Error(Errc::config, "graph output must be scalar, got " + shape_str(out.shape));
  }
  Graph g;
  g.nodes_ = nodes_;
  g.output_ = output;
  g.layout_ = std::make_shared<const ParamLayout>(groups_);
  return g;
}

}  // namespace losscape
