// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "koopid/dataset.hpp"
#include "koopid/edmd.hpp"

namespace koopid {

enum class RolloutMode {
  kRelift,        // recover x, lift again every step
  kLiftedSpace,   // propagate theta directly (diagnostics only)
};

struct PredictionResult {
  std::string episode_id;
  /// m x (K+1); K = T unless the rollout diverged.
  Matrix states;
  /// Euclidean error per column; empty until compared with a reference.
  Vector step_error;
  bool diverged = false;
  int diverged_at = -1;  // first step whose state was non-finite
};

PredictionResult rollout(const KoopmanModel& model, const Vector& x0,
                         const Matrix& inputs,
                         RolloutMode mode = RolloutMode::kRelift);

/// Rollout from the episode's initial state and inputs, with step_error set.
PredictionResult rollout(const KoopmanModel& model, const Episode& reference,
                         RolloutMode mode = RolloutMode::kRelift);

struct ErrorSummary {
  /// sqrt of the mean squared component error, pooled over channels.
  double rms = 0.0;
  /// Mean signed component error, pooled over channels.
  double mean = 0.0;
  int steps = 0;
  bool diverged = false;
  int diverged_at = -1;
  std::string episode_id;
};

/// Statistics over steps 1..K of the (possibly truncated) prediction.
ErrorSummary prediction_errors(const PredictionResult& pred,
                               const Episode& reference);

struct ModelError {
  double full;
  double a_only;
  double b_only;
};

/// ||U - U_ref||_F / ||U_ref||_F for [A B], A and B.
ModelError relative_model_error(const KoopmanModel& U,
                                const KoopmanModel& U_ref);

}  // namespace koopid
