// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "losscape/params.hpp"

namespace losscape {

/// On-disk parameter vector ("GVCK"). Little-endian layout:
///   magic "GVCK" | u32 version | u64 param_count | f64 values[param_count]
///   | u32 crc32 of all preceding bytes
/// The layout travels in a JSON sidecar at `path + ".json"`:
///   {"groups": [{"name", "offset", "count", "kind", "filter_shape"}]}
/// Direction vectors use the same container, so user-supplied directions can
/// be imported anywhere a checkpoint is accepted.
void save_checkpoint(const std::string& path, const FlatParams& params);

FlatParams load_checkpoint(const std::string& path);

}  // namespace losscape
