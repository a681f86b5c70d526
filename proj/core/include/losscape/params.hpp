// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace losscape {

enum class GroupKind { conv_filter, fc_row, bias, batchnorm };

const char* to_string(GroupKind kind);
GroupKind group_kind_from_string(const std::string& s);

/// One contiguous slice of the flat parameter vector. conv_filter groups hold
/// the weights of a single convolution filter, fc_row groups one output
/// neuron's weight row; both carry the shape used for Frobenius-norm
/// normalization.
struct ParamGroup {
  std::string name;
  std::size_t offset = 0;
  std::size_t count = 0;
  GroupKind kind = GroupKind::bias;
  std::vector<std::int64_t> filter_shape;  // empty for bias/batchnorm
};

/// Ordered, contiguous, non-overlapping groups covering [0, total_count).
class ParamLayout {
 public:
  explicit ParamLayout(std::vector<ParamGroup> groups);

  const std::vector<ParamGroup>& groups() const { return groups_; }
  std::size_t total_count() const { return total_count_; }

  bool operator==(const ParamLayout& other) const;

 private:
  std::vector<ParamGroup> groups_;
  std::size_t total_count_ = 0;
};

using LayoutPtr = std::shared_ptr<const ParamLayout>;

/// Flat, ordered vector of all model parameters with its layout.
struct FlatParams {
  std::vector<double> values;
  LayoutPtr layout;

  FlatParams() = default;
  FlatParams(std::vector<double> v, LayoutPtr l) : values(std::move(v)), layout(std::move(l)) {}
  explicit FlatParams(LayoutPtr l) : layout(std::move(l)) {
    values.assign(layout ? layout->total_count() : 0, 0.0);
  }

  std::size_t size() const { return values.size(); }
};

/// A displacement vector in weight space; structurally identical to
/// FlatParams and sharing its layout.
using Direction = FlatParams;

/// Throws Errc::layout unless `p` matches `layout` in structure and length.
void check_layout(const FlatParams& p, const ParamLayout& layout, const char* what);

/// Throws Errc::layout unless both share one layout (structurally).
void check_same_layout(const FlatParams& a, const FlatParams& b, const char* what);

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace losscape
