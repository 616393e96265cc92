// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "koopid/edmd.hpp"
#include "koopid/matlib.hpp"

namespace koopid {

inline constexpr double kDefaultConditionCap = 1e12;

struct CombineReport {
  Matrix A_tilde;
  Matrix B_tilde;
  /// ||A~^2 - A_ff A_bb^{-1}||_F / ||A_ff A_bb^{-1}||_F
  double sqrt_residual = 0.0;
  double discarded_imag = 0.0;
  double spectral_radius = 0.0;
  double abb_condition = 0.0;
  /// 1 + A~ was rank deficient; B~ is the least-norm solution.
  bool rank_deficient = false;
};

/// A~ = sqrtm(A_ff A_bb^{-1}). Fills A_tilde, residual, radius and condition.
Matrix combine_A(const Matrix& A_ff, const Matrix& A_bb,
                 CombineReport* report = nullptr,
                 double condition_cap = kDefaultConditionCap,
                 double imag_tol = kDefaultImagTol);

/// B~ = (1 + A~)^+ (B_ff - A_ff A_bb^{-1} B_bb).
Matrix combine_B(const Matrix& A_tilde, const Matrix& A_ff, const Matrix& B_ff,
                 const Matrix& A_bb, const Matrix& B_bb,
                 CombineReport* report = nullptr,
                 double condition_cap = kDefaultConditionCap);

struct FbModel {
  KoopmanModel model;
  CombineReport report;
};

/// Tagged fbedmd-as when either input came from the constrained solve.
FbModel build_fb_model(const KoopmanModel& forward,
                       const KoopmanModel& backward,
                       double condition_cap = kDefaultConditionCap);

}  // namespace koopid
