// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "losscape/batch.hpp"

namespace losscape {

/// In-memory labelled dataset. Iteration order is a pure function of
/// (seed, epoch), so runs are reproducible regardless of how many workers
/// later consume the batches.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<double> features, std::vector<std::int64_t> sample_shape,
          std::vector<int> labels, int num_classes);

  std::size_t size() const { return labels_.size(); }
  int num_classes() const { return num_classes_; }
  const std::vector<std::int64_t>& sample_shape() const { return sample_shape_; }
  std::int64_t sample_dim() const { return sample_dim_; }
  const std::vector<double>& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }

  /// Seeded Fisher-Yates shuffle of [0, size).
  std::vector<std::size_t> epoch_order(std::uint64_t seed, int epoch) const;

  /// Assembles a batch from explicit sample indices. `sample_shape_override`
  /// reshapes each sample (same element count), e.g. [d] -> [1,h,w].
  Batch make_batch(std::span<const std::size_t> indices,
                   std::span<const std::int64_t> sample_shape_override = {}) const;

  /// Contiguous minibatches of the (seed, epoch) order; the tail batch may be
  /// short.
  std::vector<Batch> batches(int batch_size, std::uint64_t seed, int epoch,
                             std::span<const std::int64_t> sample_shape_override = {}) const;

  /// First ceil(fraction * size) indices under the (seed, epoch 0) shuffle.
  std::vector<std::size_t> subset_indices(double fraction, std::uint64_t seed) const;

 private:
  std::vector<double> features_;
  std::vector<std::int64_t> sample_shape_;
  std::vector<int> labels_;
  int num_classes_ = 0;
  std::int64_t sample_dim_ = 0;
};

/// Gaussian class blobs (unit within-class sigma). Class centers are placed
/// `separation` apart in sigma units: on scaled coordinate axes when
/// num_classes <= dim (guaranteed pairwise separation), otherwise on random
/// directions of the same radius. Bit-identical for a fixed seed.
Dataset make_synthetic(int num_classes, int dim, int samples, std::uint64_t seed,
                       double separation = 8.0);

}  // namespace losscape
