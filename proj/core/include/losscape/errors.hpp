// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace losscape {

/// Error categories. The CLI maps these onto process exit codes, so the set
/// is deliberately small and stable.
enum class Errc {
  config,                // invalid configuration or arguments
  layout,                // parameter vector does not match the expected layout
  numeric,               // non-finite value encountered during evaluation
  format,                // malformed or corrupt on-disk artifact
  missing_input,         // a required input file/directory does not exist
  rank_deficient,        // trajectory differences span less than two directions
  degenerate_direction,  // zero-norm direction group against nonzero weights
  partial_result,        // fewer results converged than requested
  oracle_cap,            // dense oracle refused: problem above configured cap
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace losscape
