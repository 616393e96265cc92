// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include "koopid/lifting.hpp"
#include "koopid/snapshots.hpp"

namespace koopid {

enum class Method { kEdmd, kEdmdAs, kFbEdmd, kFbEdmdAs };

const char* method_name(Method m);
std::optional<Method> parse_method(const std::string& s);

/// theta(x_{k+1}) = A theta(x_k) + B upsilon(u_k).
struct KoopmanModel {
  Matrix A;  // p_theta x p_theta
  Matrix B;  // p_theta x p_upsilon
  LiftingSpec spec;
  Method method = Method::kEdmd;
  Direction direction = Direction::kForward;

  /// [A B]
  Matrix koopman_matrix() const;
  void validate() const;
};

/// U = G H^+ split into [A B]; forward Grams required.
KoopmanModel edmd_forward(const GramPair& g, const LiftingSpec& spec,
                          double pinv_tol = kDefaultPinvTol);

/// Same regression on backward Grams; A, B propagate one step back in time.
KoopmanModel edmd_backward(const GramPair& g, const LiftingSpec& spec,
                           double pinv_tol = kDefaultPinvTol);

}  // namespace koopid
