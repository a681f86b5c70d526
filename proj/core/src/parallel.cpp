// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/parallel.hpp"

#include <exception>
#include <mutex>
#include <thread>

#include "losscape/errors.hpp"

namespace losscape {

std::vector<ChunkRange> balanced_chunks(std::size_t n, int workers) {
  if (workers < 1) throw Error(Errc::config, "balanced_chunks: workers must be >= 1");
  const std::size_t w = static_cast<std::size_t>(workers);
  const std::size_t base = n / w;
  const std::size_t extra = n % w;
  std::vector<ChunkRange> chunks(w);
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < w; ++i) {
    std::size_t len = base + (i < extra ? 1 : 0);
    chunks[i] = {cursor, cursor + len};
    cursor += len;
  }
  return chunks;
}

void parallel_for_ranges(std::size_t n, int workers, const std::function<void(ChunkRange)>& fn) {
  if (n == 0) return;
  std::vector<ChunkRange> chunks = balanced_chunks(n, workers);

  if (workers == 1) {
    fn(chunks.front());
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (const ChunkRange& chunk : chunks) {
    if (chunk.size() == 0) continue;
    threads.emplace_back([&, chunk] {
      try {
        fn(chunk);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (std::thread& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void parallel_for_chunked(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  parallel_for_ranges(n, workers, [&fn](ChunkRange chunk) {
    for (std::size_t i = chunk.begin; i < chunk.end; ++i) fn(i);
  });
}

std::vector<double> pairwise_sum(std::vector<std::vector<double>> parts) {
  if (parts.empty()) return {};
  while (parts.size() > 1) {
    std::vector<std::vector<double>> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
      std::vector<double>& a = parts[i];
      const std::vector<double>& b = parts[i + 1];
      for (std::size_t j = 0; j < a.size(); ++j) a[j] += b[j];
      next.push_back(std::move(a));
    }
    if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
  return std::move(parts.front());
}

}  // namespace losscape
