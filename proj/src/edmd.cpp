// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include "koopid/edmd.hpp"

#include "koopid/error.hpp"

namespace koopid {

const char* method_name(Method m) {
  switch (m) {
    case Method::kEdmd: return "edmd";
    case Method::kEdmdAs: return "edmd-as";
    case Method::kFbEdmd: return "fbedmd";
    case Method::kFbEdmdAs: return "fbedmd-as";
  }
  return "unknown";
}

std::optional<Method> parse_method(const std::string& s) {
  for (Method m : {Method::kEdmd, Method::kEdmdAs, Method::kFbEdmd,
                   Method::kFbEdmdAs}) {
    if (s == method_name(m)) return m;
  }
  return std::nullopt;
}

Matrix KoopmanModel::koopman_matrix() const {
  Matrix U(A.rows(), A.cols() + B.cols());
  U << A, B;
  return U;
}

void KoopmanModel::validate() const {
  spec.validate();
  const int pt = spec.lifted_state_dim();
  KOOPID_CHECK(A.rows() == pt && A.cols() == pt, ErrorCode::kDimension,
               "model: A must be p_theta x p_theta");
  KOOPID_CHECK(B.rows() == pt && B.cols() == spec.lifted_input_dim(),
               ErrorCode::kDimension, "model: B must be p_theta x p_upsilon");
  KOOPID_CHECK(A.allFinite() && B.allFinite(), ErrorCode::kNumeric,
               "model: non-finite entries");
}

namespace {

KoopmanModel regress(const GramPair& g, const LiftingSpec& spec, double tol,
                     Direction expected) {
  KOOPID_CHECK(g.direction == expected, ErrorCode::kInvalidInput,
               std::string("edmd: expected ") + direction_name(expected) +
                   " Gram pair");
  const int pt = spec.lifted_state_dim();
  KOOPID_CHECK(g.G.rows() == pt && g.H.rows() == g.G.cols() &&
                   g.H.cols() == g.G.cols() && g.G.cols() >= pt,
               ErrorCode::kDimension, "edmd: Gram dimensions do not match lifting");
  const Matrix U = g.G * pinv(g.H, tol);
  KOOPID_CHECK(U.allFinite(), ErrorCode::kNumeric, "edmd: non-finite solution");
  KoopmanModel m;
  m.A = U.leftCols(pt);
  m.B = U.rightCols(U.cols() - pt);
  m.spec = spec;
  m.method = Method::kEdmd;
  m.direction = expected;
  return m;
}

}  // namespace

KoopmanModel edmd_forward(const GramPair& g, const LiftingSpec& spec,
                          double pinv_tol) {
  return regress(g, spec, pinv_tol, Direction::kForward);
}

KoopmanModel edmd_backward(const GramPair& g, const LiftingSpec& spec,
                           double pinv_tol) {
  return regress(g, spec, pinv_tol, Direction::kBackward);
}

}  // namespace koopid
