// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include "koopid/error.hpp"

namespace koopid {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kDimension: return "dimension";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kNoPrincipalRoot: return "no-principal-root";
    case ErrorCode::kComplexRoot: return "complex-root";
    case ErrorCode::kSimulationDiverged: return "simulation-diverged";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kSolverFailure: return "solver";
    case ErrorCode::kConditioning: return "conditioning";
    case ErrorCode::kUnsupportedRecovery: return "unsupported-recovery";
    case ErrorCode::kUndefinedReference: return "undefined-reference";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kUsage: return "usage";
  }
  return "unknown";
}

}  // namespace koopid
