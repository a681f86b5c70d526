// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "losscape/data.hpp"

namespace losscape {

/// On-disk dataset container ("GVDS"). Little-endian layout:
///   magic "GVDS" | u32 version | u64 sample_count | u32 ndims | u32 dims[]
///   | u32 num_classes | u32 labels[count] | f64 features[count * dim]
///   | u32 crc32 of all preceding bytes
void save_dataset(const std::string& path, const Dataset& ds);

/// Loads and checksum-verifies a GVDS file. Format errors name the byte
/// offset (or expected vs actual length for truncation).
Dataset load_dataset(const std::string& path);

}  // namespace losscape
