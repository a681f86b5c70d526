// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace losscape {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace losscape
