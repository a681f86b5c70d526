// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace losscape {

/// Dense row-major tensor of 64-bit reals.
struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<double> values;

  Tensor() = default;
  explicit Tensor(std::vector<std::int64_t> s) : shape(std::move(s)) {
    values.assign(static_cast<std::size_t>(numel(shape)), 0.0);
  }
  Tensor(std::vector<std::int64_t> s, std::vector<double> v) : shape(std::move(s)), values(std::move(v)) {}

  static std::int64_t numel(const std::vector<std::int64_t>& shape) {
    std::int64_t n = 1;
    for (std::int64_t d : shape) n *= d;
    return n;
  }

  std::int64_t numel() const { return numel(shape); }
  bool consistent() const { return numel() == static_cast<std::int64_t>(values.size()); }
};

}  // namespace losscape
