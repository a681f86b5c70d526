// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace losscape {

struct ChunkRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
};

/// Contiguous split of [0, n) into `workers` chunks balanced to +-1 element;
/// the first n % workers chunks get the extra element. Chunk boundaries
/// depend only on (n, workers), never on scheduling.
std::vector<ChunkRange> balanced_chunks(std::size_t n, int workers);

/// Runs fn(i) for every i in [0, n), one thread per non-empty chunk. Results
/// must be written to per-index slots by the caller; the index->chunk mapping
/// is static, so outputs are identical for any worker count. The first
/// exception thrown by any worker is rethrown after all threads join.
void parallel_for_chunked(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

/// Same static chunking, but hands each worker its whole contiguous range so
/// per-worker scratch can live across iterations.
void parallel_for_ranges(std::size_t n, int workers, const std::function<void(ChunkRange)>& fn);

/// Sums vectors over a fixed pairwise tree in index order:
/// ((v0+v1)+(v2+v3))+... The tree shape depends only on the part count, so
/// the floating-point result is reproducible bit-for-bit however the parts
/// were produced.
std::vector<double> pairwise_sum(std::vector<std::vector<double>> parts);

}  // namespace losscape
