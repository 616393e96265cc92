// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include "koopid/fbcombine.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

#include "koopid/error.hpp"

namespace koopid {

namespace {

double condition_number(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M);
  const Vector& s = svd.singularValues();
  const double lo = s(s.size() - 1);
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / lo;
}

// Factorization of A_bb with a condition guard.
Eigen::PartialPivLU<Matrix> factor_abb(const Matrix& A_bb, double cap,
                                       double* cond_out) {
  KOOPID_CHECK(A_bb.rows() == A_bb.cols() && A_bb.size() > 0,
               ErrorCode::kDimension, "combine: A_bb must be square");
  KOOPID_CHECK(all_finite(A_bb), ErrorCode::kInvalidInput,
               "combine: non-finite A_bb");
  const double cond = condition_number(A_bb);
  if (cond_out != nullptr) *cond_out = cond;
  KOOPID_CHECK(std::isfinite(cond) && cond <= cap, ErrorCode::kConditioning,
               "combine: A_bb condition number " + std::to_string(cond) +
                   " exceeds cap");
  return Eigen::PartialPivLU<Matrix>(A_bb);
}

}  // namespace

Matrix combine_A(const Matrix& A_ff, const Matrix& A_bb, CombineReport* report,
                 double condition_cap, double imag_tol) {
  KOOPID_CHECK(A_ff.rows() == A_ff.cols() && A_ff.rows() == A_bb.rows() &&
                   A_bb.rows() == A_bb.cols(),
               ErrorCode::kDimension, "combine_A: A_ff and A_bb must be square "
                                      "and of equal size");
  KOOPID_CHECK(all_finite(A_ff), ErrorCode::kInvalidInput,
               "combine_A: non-finite A_ff");
  double cond = 0.0;
  const Matrix A_bb_t = A_bb.transpose();
  const auto lu = factor_abb(A_bb_t, condition_cap, &cond);
  // A_ff A_bb^{-1} = (A_bb^{-T} A_ff^T)^T
  const Matrix M = lu.solve(A_ff.transpose()).transpose();
  const SqrtmResult r = sqrtm_detailed(M, imag_tol);
  if (report != nullptr) {
    report->A_tilde = r.root;
    const double mn = M.norm();
    report->sqrt_residual =
        mn > 0.0 ? (r.root * r.root - M).norm() / mn : (r.root * r.root).norm();
    report->discarded_imag = r.discarded_imag;
    report->spectral_radius = spectral_radius(r.root);
    report->abb_condition = cond;
  }
  return r.root;
}

Matrix combine_B(const Matrix& A_tilde, const Matrix& A_ff, const Matrix& B_ff,
                 const Matrix& A_bb, const Matrix& B_bb, CombineReport* report,
                 double condition_cap) {
  const auto n = A_ff.rows();
  KOOPID_CHECK(A_tilde.rows() == n && A_tilde.cols() == n && A_ff.cols() == n &&
                   A_bb.rows() == n && A_bb.cols() == n && B_ff.rows() == n &&
                   B_bb.rows() == n && B_ff.cols() == B_bb.cols(),
               ErrorCode::kDimension, "combine_B: inconsistent dimensions");
  KOOPID_CHECK(all_finite(B_ff) && all_finite(B_bb) && all_finite(A_tilde),
               ErrorCode::kInvalidInput, "combine_B: non-finite input");
  const auto lu = factor_abb(A_bb, condition_cap, nullptr);
  if (B_ff.cols() == 0) return Matrix(n, 0);
  const Matrix B_fb = -lu.solve(B_bb);
  const Matrix rhs = B_ff + A_ff * B_fb;
  const Matrix S = Matrix::Identity(n, n) + A_tilde;

  Eigen::JacobiSVD<Matrix> svd(S);
  const Vector& s = svd.singularValues();
  const bool deficient = s(n - 1) <= kDefaultPinvTol * s(0);
  const Matrix B = pinv(S) * rhs;
  if (report != nullptr) {
    report->B_tilde = B;
    report->rank_deficient = deficient;
  }
  return B;
}

FbModel build_fb_model(const KoopmanModel& forward, const KoopmanModel& backward,
                       double condition_cap) {
  KOOPID_CHECK(forward.direction == Direction::kForward &&
                   backward.direction == Direction::kBackward,
               ErrorCode::kInvalidInput,
               "build_fb_model: expected a forward and a backward model");
  KOOPID_CHECK(forward.A.rows() == backward.A.rows() &&
                   forward.B.cols() == backward.B.cols(),
               ErrorCode::kDimension, "build_fb_model: model dimensions differ");
  KOOPID_CHECK(forward.spec.lifted_state_dim() ==
                       backward.spec.lifted_state_dim() &&
                   forward.spec.rbf_centers.size() ==
                       backward.spec.rbf_centers.size(),
               ErrorCode::kDimension, "build_fb_model: lifting specs differ");
  forward.validate();
  backward.validate();

  FbModel out;
  out.model.A = combine_A(forward.A, backward.A, &out.report, condition_cap);
  out.model.B = combine_B(out.model.A, forward.A, forward.B, backward.A,
                          backward.B, &out.report, condition_cap);
  out.report.B_tilde = out.model.B;
  out.model.spec = forward.spec;
  out.model.direction = Direction::kForward;
  const bool constrained = forward.method == Method::kEdmdAs ||
                           backward.method == Method::kEdmdAs;
  out.model.method = constrained ? Method::kFbEdmdAs : Method::kFbEdmd;
  return out;
}

}  // namespace koopid
