// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include "koopid/rollout.hpp"

#include <cmath>

#include "koopid/error.hpp"

namespace koopid {

PredictionResult rollout(const KoopmanModel& model, const Vector& x0,
                         const Matrix& inputs, RolloutMode mode) {
  model.validate();
  const LiftingSpec& spec = model.spec;
  KOOPID_CHECK(spec.include_raw_states, ErrorCode::kUnsupportedRecovery,
               "rollout: lifting does not contain the raw states");
  KOOPID_CHECK(x0.size() == spec.state_dim, ErrorCode::kDimension,
               "rollout: x0 has wrong length");
  KOOPID_CHECK(inputs.rows() == spec.input_dim, ErrorCode::kDimension,
               "rollout: inputs have wrong row count");
  KOOPID_CHECK(x0.allFinite() && inputs.allFinite(), ErrorCode::kInvalidInput,
               "rollout: non-finite x0 or inputs");

  const Eigen::Index T = inputs.cols();
  PredictionResult out;
  out.states.resize(spec.state_dim, T + 1);
  out.states.col(0) = x0;
  Vector theta = lift_state(spec, x0);
  Eigen::Index k = 0;
  for (; k < T; ++k) {
    const Vector next = model.A * theta + model.B * lift_input(spec, inputs.col(k));
    if (!next.allFinite()) break;
    const Vector x = recover_state(spec, next);
    if (mode == RolloutMode::kRelift) {
      theta = lift_state(spec, x);
      if (!theta.allFinite()) break;
    } else {
      theta = next;
    }
    out.states.col(k + 1) = x;
  }
  if (k < T) {
    out.diverged = true;
    out.diverged_at = static_cast<int>(k + 1);
    out.states.conservativeResize(Eigen::NoChange, k + 1);
  }
  return out;
}

PredictionResult rollout(const KoopmanModel& model, const Episode& reference,
                         RolloutMode mode) {
  KOOPID_CHECK(reference.states.cols() >= 1, ErrorCode::kInvalidInput,
               "rollout: empty reference episode");
  PredictionResult out =
      rollout(model, Vector(reference.states.col(0)), reference.inputs, mode);
  out.episode_id = reference.id;
  const auto K = out.states.cols();
  out.step_error =
      (out.states - reference.states.leftCols(K)).colwise().norm().transpose();
  return out;
}

ErrorSummary prediction_errors(const PredictionResult& pred,
                               const Episode& reference) {
  const auto K = pred.states.cols();
  KOOPID_CHECK(pred.states.rows() == reference.states.rows() &&
                   K <= reference.states.cols() && K >= 1,
               ErrorCode::kDimension,
               "prediction_errors: prediction and reference shapes differ");
  ErrorSummary s;
  s.episode_id = pred.episode_id.empty() ? reference.id : pred.episode_id;
  s.diverged = pred.diverged;
  s.diverged_at = pred.diverged_at;
  s.steps = static_cast<int>(K - 1);
  if (K < 2) return s;
  const Matrix E = pred.states.rightCols(K - 1) -
                   reference.states.middleCols(1, K - 1);
  const double n = static_cast<double>(E.size());
  s.rms = E.stableNorm() / std::sqrt(n);
  s.mean = E.sum() / n;
  return s;
}

ModelError relative_model_error(const KoopmanModel& U, const KoopmanModel& U_ref) {
  KOOPID_CHECK(U.A.rows() == U_ref.A.rows() && U.A.cols() == U_ref.A.cols() &&
                   U.B.rows() == U_ref.B.rows() && U.B.cols() == U_ref.B.cols(),
               ErrorCode::kDimension, "relative_model_error: dimensions differ");
  const double na = U_ref.A.norm();
  const double nb = U_ref.B.norm();
  const double nf = std::sqrt(na * na + nb * nb);
  KOOPID_CHECK(na > 0.0 && nb > 0.0, ErrorCode::kUndefinedReference,
               "relative_model_error: reference has a zero block");
  const double da = (U.A - U_ref.A).norm();
  const double db = (U.B - U_ref.B).norm();
  return {std::sqrt(da * da + db * db) / nf, da / na, db / nb};
}

}  // namespace koopid
