// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/data.hpp"

#include <algorithm>
#include <cmath>

#include "losscape/errors.hpp"
#include "losscape/rng.hpp"

namespace losscape {

Dataset::Dataset(std::vector<double> features, std::vector<std::int64_t> sample_shape,
                 std::vector<int> labels, int num_classes)
    : features_(std::move(features)),
      sample_shape_(std::move(sample_shape)),
      labels_(std::move(labels)),
      num_classes_(num_classes) {
  sample_dim_ = 1;
  for (std::int64_t d : sample_shape_) sample_dim_ *= d;
  if (features_.size() != labels_.size() * static_cast<std::size_t>(sample_dim_)) {
    throw Error(Errc::config, "dataset: feature array does not match sample count x dim");
  }
  for (int y : labels_) {
    if (y < 0 || y >= num_classes_) throw Error(Errc::config, "dataset: label out of range");
  }
}

std::vector<std::size_t> Dataset::epoch_order(std::uint64_t seed, int epoch) const {
  std::vector<std::size_t> order(size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SplitMix64 rng(seed_mix(seed, "shuffle", static_cast<std::uint64_t>(epoch)));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

Batch Dataset::make_batch(std::span<const std::size_t> indices,
                          std::span<const std::int64_t> sample_shape_override) const {
  if (indices.empty()) throw Error(Errc::config, "make_batch: empty index set");
  std::vector<std::int64_t> shape{static_cast<std::int64_t>(indices.size())};
  if (sample_shape_override.empty()) {
    shape.insert(shape.end(), sample_shape_.begin(), sample_shape_.end());
  } else {
    std::int64_t n = 1;
    for (std::int64_t d : sample_shape_override) n *= d;
    if (n != sample_dim_) {
      throw Error(Errc::config, "make_batch: shape override element count mismatch");
    }
    shape.insert(shape.end(), sample_shape_override.begin(), sample_shape_override.end());
  }

  Batch b;
  b.inputs.shape = std::move(shape);
  b.inputs.values.resize(indices.size() * static_cast<std::size_t>(sample_dim_));
  b.labels.resize(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t s = indices[i];
    if (s >= size()) throw Error(Errc::config, "make_batch: index out of range");
    std::copy_n(features_.begin() + static_cast<std::ptrdiff_t>(s * sample_dim_), sample_dim_,
                b.inputs.values.begin() + static_cast<std::ptrdiff_t>(i * sample_dim_));
    b.labels[i] = labels_[s];
  }
  return b;
}

std::vector<Batch> Dataset::batches(int batch_size, std::uint64_t seed, int epoch,
                                    std::span<const std::int64_t> sample_shape_override) const {
  if (batch_size < 1) throw Error(Errc::config, "batches: batch_size must be >= 1");
  std::vector<std::size_t> order = epoch_order(seed, epoch);
  std::vector<Batch> out;
  for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch_size)) {
    std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(batch_size));
    out.push_back(make_batch({order.data() + start, end - start}, sample_shape_override));
  }
  return out;
}

std::vector<std::size_t> Dataset::subset_indices(double fraction, std::uint64_t seed) const {
  if (fraction <= 0.0 || fraction > 1.0) {
    throw Error(Errc::config, "subset_indices: fraction must be in (0, 1]");
  }
  std::vector<std::size_t> order = epoch_order(seed, 0);
  std::size_t keep = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(order.size())));
  keep = std::max<std::size_t>(1, std::min(keep, order.size()));
  order.resize(keep);
  return order;
}

Dataset make_synthetic(int num_classes, int dim, int samples, std::uint64_t seed,
                       double separation) {
  if (num_classes < 1 || dim < 1) throw Error(Errc::config, "make_synthetic: bad dimensions");
  if (samples < num_classes) {
    throw Error(Errc::config, "make_synthetic: need at least one sample per class");
  }

  SplitMix64 rng(seed_mix(seed, "synthetic"));
  std::vector<std::vector<double>> centers(static_cast<std::size_t>(num_classes),
                                           std::vector<double>(static_cast<std::size_t>(dim), 0.0));
  if (num_classes <= dim) {
    for (int c = 0; c < num_classes; ++c) centers[c][static_cast<std::size_t>(c)] = separation;
  } else {
    for (int c = 0; c < num_classes; ++c) {
      double norm = 0.0;
      for (int d = 0; d < dim; ++d) {
        centers[c][static_cast<std::size_t>(d)] = rng.gaussian();
        norm += centers[c][static_cast<std::size_t>(d)] * centers[c][static_cast<std::size_t>(d)];
      }
      norm = std::sqrt(norm);
      for (int d = 0; d < dim; ++d) centers[c][static_cast<std::size_t>(d)] *= separation / norm;
    }
  }

  std::vector<double> features(static_cast<std::size_t>(samples) * dim);
  std::vector<int> labels(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    const int label = s % num_classes;
    labels[static_cast<std::size_t>(s)] = label;
    for (int d = 0; d < dim; ++d) {
      features[static_cast<std::size_t>(s) * dim + d] =
          centers[label][static_cast<std::size_t>(d)] + rng.gaussian();
    }
  }
  return Dataset(std::move(features), {dim}, std::move(labels), num_classes);
}

}  // namespace losscape
