// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "losscape/params.hpp"
#include "losscape/tensor.hpp"

namespace losscape {

enum class OpKind {
  input,         // batch features
  constant,      // fixed tensor baked into the graph
  param,         // contiguous slice of the flat parameter vector
  matmul,        // y[b,m] = sum_k x[b,k] * W[m,k]
  conv2d,        // valid padding, stride 1
  maxpool2,      // 2x2 window, stride 2, floor on odd extents
  relu,
  tanh_act,
  bias_add,      // broadcast over batch (and spatial dims for conv maps)
  flatten,       // [B, d0, d1, ...] -> [B, d0*d1*...]
  batchnorm,     // inference form: learned scale/shift, fixed running stats
  softmax_xent,  // mean cross-entropy over the batch, uses integer labels
  mse,           // mean squared error over all elements, uses targets
  mul,           // elementwise product
  sum,           // reduction to scalar
  scale,         // multiply by a compile-time constant
};

/// One operation record. Shapes use -1 as the leading batch dimension for
/// batch-dependent nodes; parameter and constant nodes are concrete.
struct Node {
  OpKind op;
  std::vector<int> inputs;
  std::vector<std::int64_t> shape;

  std::size_t param_offset = 0;  // param nodes: slice of the flat vector
  std::size_t param_count = 0;
  std::vector<double> const_values;   // constant payload / batchnorm mean
  std::vector<double> const_values2;  // batchnorm variance
  double scalar = 1.0;                // scale factor / batchnorm epsilon
  int conv_out_c = 0, conv_in_c = 0, conv_kh = 0, conv_kw = 0;
};

/// Topologically ordered operation records with a scalar loss output.
/// Immutable after construction and safe to share across threads.
class Graph {
 public:
  const std::vector<Node>& nodes() const { return nodes_; }
  int output() const { return output_; }
  const LayoutPtr& layout() const { return layout_; }

 private:
  friend class GraphBuilder;
  std::vector<Node> nodes_;
  int output_ = -1;
  LayoutPtr layout_;
};

/// Builds graphs node by node; inputs must already exist, so the node order
/// is topological by construction.
class GraphBuilder {
 public:
  /// Batch features with per-sample shape `sample_shape`.
  int input(std::vector<std::int64_t> sample_shape);

  int constant(Tensor value);

  /// Fully-connected weight [out, in]; one fc_row layout group per output row.
  int fc_weight(const std::string& name, std::int64_t out, std::int64_t in);

  /// Convolution weight [out_c, in_c, kh, kw]; one conv_filter group per filter.
  int conv_weight(const std::string& name, int out_c, int in_c, int kh, int kw);

  /// Bias vector [n] as a single bias group.
  int bias(const std::string& name, std::int64_t n);

  /// Batch-norm scale or shift vector [c] as a single batchnorm group.
  int batchnorm_param(const std::string& name, std::int64_t c, double init);

  int matmul(int x, int w);
  int conv2d(int x, int w);
  int maxpool2(int x);
  int flatten(int x);
  int relu(int x);
  int tanh_act(int x);
  int bias_add(int x, int b);
  int batchnorm(int x, int gamma, int beta, std::vector<double> running_mean,
                std::vector<double> running_var, double eps = 1e-5);
  int softmax_xent(int logits);
  int mse(int pred);
  int mul(int a, int b);
  int sum(int x);
  int scale(int x, double factor);

  /// Finalizes the graph with `output` as the scalar loss node.
  Graph finish(int output);

  /// Shape of an already-added node (leading -1 = batch).
  const std::vector<std::int64_t>& shape_of(int id) const;

  /// Initial value recorded for every parameter group added so far, in layout
  /// order. Used by initializers that want declared defaults (batch-norm).
  const std::vector<double>& declared_init() const { return declared_init_; }

 private:
  int add_node(Node n);
  const Node& at(int id) const;
  int add_param(const std::string& name, GroupKind kind, std::vector<ParamGroup> groups,
                std::vector<std::int64_t> node_shape, double init);

  std::vector<Node> nodes_;
  std::vector<ParamGroup> groups_;
  std::vector<double> declared_init_;
  std::size_t param_cursor_ = 0;
};

}  // namespace losscape
