// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/params.hpp"

#include "losscape/errors.hpp"

namespace losscape {

const char* to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::conv_filter: return "conv_filter";
    case GroupKind::fc_row: return "fc_row";
    case GroupKind::bias: return "bias";
    case GroupKind::batchnorm: return "batchnorm";
  }
  return "unknown";
}

GroupKind group_kind_from_string(const std::string& s) {
  if (s == "conv_filter") return GroupKind::conv_filter;
  if (s == "fc_row") return GroupKind::fc_row;
  if (s == "bias") return GroupKind::bias;
  if (s == "batchnorm") return GroupKind::batchnorm;
  throw Error(Errc::format, "unknown parameter group kind: " + s);
}

ParamLayout::ParamLayout(std::vector<ParamGroup> groups) : groups_(std::move(groups)) {
  std::size_t expected_offset = 0;
  for (const ParamGroup& g : groups_) {
    if (g.offset != expected_offset) {
      throw Error(Errc::layout, "parameter group '" + g.name + "' is not contiguous");
    }
    if (g.count == 0) {
      throw Error(Errc::layout, "parameter group '" + g.name + "' is empty");
    }
    if (g.kind == GroupKind::conv_filter || g.kind == GroupKind::fc_row) {
      std::size_t prod = 1;
      for (std::int64_t d : g.filter_shape) prod *= static_cast<std::size_t>(d);
      if (g.filter_shape.empty() || prod != g.count) {
        throw Error(Errc::layout, "group '" + g.name + "': filter_shape does not match count");
      }
    }
    expected_offset += g.count;
  }
  total_count_ = expected_offset;
}

bool ParamLayout::operator==(const ParamLayout& other) const {
  if (total_count_ != other.total_count_ || groups_.size() != other.groups_.size()) return false;
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    const ParamGroup& a = groups_[i];
    const ParamGroup& b = other.groups_[i];
    if (a.offset != b.offset || a.count != b.count || a.kind != b.kind ||
        a.filter_shape != b.filter_shape) {
      return false;
    }
  }
  return true;
}

void check_layout(const FlatParams& p, const ParamLayout& layout, const char* what) {
  if (!p.layout) {
    throw Error(Errc::layout, std::string(what) + ": parameter vector has no layout");
  }
  if (p.values.size() != layout.total_count() || !(*p.layout == layout)) {
    throw Error(Errc::layout, std::string(what) + ": parameter vector does not match model layout");
  }
}

void check_same_layout(const FlatParams& a, const FlatParams& b, const char* what) {
  if (!a.layout || !b.layout) {
    throw Error(Errc::layout, std::string(what) + ": missing layout");
  }
  if (a.values.size() != b.values.size() || !(*a.layout == *b.layout)) {
    throw Error(Errc::layout, std::string(what) + ": layouts differ");
  }
}

}  // namespace losscape
