// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "koopid/matlib.hpp"

namespace koopid {

inline constexpr const char* kLiftingOrderingVersion = "graded-lex-v1";

/// Declarative description of the state lifting
///   theta(x) = [x; monomials of degree 2..d; r_i^2 ln r_i],
///   r_i = alpha * ||poly(x) - c_i|| + delta,
/// and of the (identity) input lifting.
///
/// With include_raw_states the degree-1 monomials are the raw states and lead
/// the lifted vector, so the state is recovered from the first m entries.
/// Without it the degree-1 block is omitted entirely.
struct LiftingSpec {
  int state_dim = 0;
  int input_dim = 0;
  int monomial_degree = 2;
  int rbf_count = 0;
  std::vector<Vector> rbf_centers;  // each of length poly_feature_count()
  double alpha = 0.1;
  double delta = 0.001;
  bool include_raw_states = true;
  std::uint64_t center_seed = 0;
  std::string ordering_version = kLiftingOrderingVersion;

  int poly_feature_count() const;
  int lifted_state_dim() const;  // p_theta
  int lifted_input_dim() const;  // p_upsilon
  int lifted_dim() const { return lifted_state_dim() + lifted_input_dim(); }

  /// Throws on any violated invariant (center length, alpha, delta, ...).
  void validate() const;

  /// State-only identity lifting, theta(x) = x.
  static LiftingSpec identity(int state_dim, int input_dim);
};

/// All monomials of total degree 1..degree in graded lexicographic order:
/// x1..xm, x1^2, x1 x2, ..., xm^2, ...
Vector poly_features(const Vector& x, int degree = 2);

/// Latin hypercube sample of rbf_count centers in the axis-aligned bounding
/// box of the columns of train_poly_features (one feature vector per column).
std::vector<Vector> sample_centers(const Matrix& train_poly_features,
                                   int rbf_count, std::uint64_t seed);

Vector lift_state(const LiftingSpec& spec, const Vector& x);
Vector lift_input(const LiftingSpec& spec, const Vector& u);
Vector recover_state(const LiftingSpec& spec, const Vector& lifted);

/// Thin-plate RBF value r^2 ln r for r = alpha * distance + delta.
double thin_plate(double distance, double alpha, double delta);

}  // namespace koopid
