// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "losscape/tensor.hpp"

namespace losscape {

/// One minibatch. `labels` feeds softmax_xent, `targets` feeds mse; only the
/// field the graph's loss node consumes has to be populated.
struct Batch {
  Tensor inputs;            // [B, ...]
  std::vector<int> labels;  // class ids, size B
  Tensor targets;           // regression targets, [B, ...]

  std::int64_t size() const { return inputs.shape.empty() ? 0 : inputs.shape[0]; }
};

}  // namespace losscape
