// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace koopid {

enum class ErrorCode {
  kInvalidInput = 1,
  kDimension,
  kNumeric,
  kNoPrincipalRoot,
  kComplexRoot,
  kSimulationDiverged,
  kInfeasible,
  kSolverFailure,
  kConditioning,
  kUnsupportedRecovery,
  kUndefinedReference,
  kIo,
  kUsage,
};

/// Short stable identifier for an error code, e.g. "dimension".
const char* error_code_name(ErrorCode code);

/// All failures inside the library are reported with this exception type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace koopid

#define KOOPID_CHECK(cond, code, msg)                       \
  do {                                                      \
    if (!(cond)) throw ::koopid::Error((code), (msg));      \
  } while (0)
