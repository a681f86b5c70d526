// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace losscape {

/// Incremental CRC-32 (IEEE 802.3, reflected, polynomial 0xEDB88320).
class Crc32 {
 public:
  void update(const void* data, std::size_t size);
  std::uint32_t value() const { return state_ ^ 0xffffffffu; }

 private:
  std::uint32_t state_ = 0xffffffffu;
};

std::uint32_t crc32(const void* data, std::size_t size);

/// CRC-32 of a whole file, as 8 lowercase hex digits. Used for provenance
/// hashes embedded into output metadata.
std::string crc32_file_hex(const std::string& path);

}  // namespace losscape
