// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include "koopid/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "koopid/error.hpp"

namespace koopid {

namespace {

// Nondecreasing index tuples of length k over [0, m), lexicographic.
void append_monomials(const Vector& x, int k, int start, double partial,
                      std::vector<double>& out) {
  if (k == 0) {
    out.push_back(partial);
    return;
  }
  for (int i = start; i < x.size(); ++i) {
    append_monomials(x, k - 1, i, partial * x(i), out);
  }
}

long binomial(long n, long k) {
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

int LiftingSpec::poly_feature_count() const {
  long count = 0;
  for (int k = 1; k <= monomial_degree; ++k) {
    count += binomial(state_dim + k - 1, k);
  }
  return static_cast<int>(count);
}

int LiftingSpec::lifted_state_dim() const {
  const int degree_one = include_raw_states ? 0 : state_dim;
  return poly_feature_count() - degree_one + rbf_count;
}

int LiftingSpec::lifted_input_dim() const { return input_dim; }

void LiftingSpec::validate() const {
  KOOPID_CHECK(state_dim >= 1, ErrorCode::kInvalidInput,
               "lifting: state_dim must be >= 1");
  KOOPID_CHECK(input_dim >= 0, ErrorCode::kInvalidInput,
               "lifting: input_dim must be >= 0");
  KOOPID_CHECK(monomial_degree >= 1, ErrorCode::kInvalidInput,
               "lifting: monomial_degree must be >= 1");
  KOOPID_CHECK(rbf_count >= 0, ErrorCode::kInvalidInput,
               "lifting: rbf_count must be >= 0");
  KOOPID_CHECK(static_cast<int>(rbf_centers.size()) == rbf_count,
               ErrorCode::kInvalidInput,
               "lifting: expected " + std::to_string(rbf_count) +
                   " centers, have " + std::to_string(rbf_centers.size()));
  const int d = poly_feature_count();
  for (const Vector& c : rbf_centers) {
    KOOPID_CHECK(c.size() == d, ErrorCode::kDimension,
                 "lifting: center length " + std::to_string(c.size()) +
                     " != polynomial feature count " + std::to_string(d));
    KOOPID_CHECK(c.allFinite(), ErrorCode::kInvalidInput,
                 "lifting: non-finite center");
  }
  if (rbf_count > 0) {
    KOOPID_CHECK(alpha > 0.0, ErrorCode::kInvalidInput,
                 "lifting: alpha must be > 0");
    KOOPID_CHECK(delta > 0.0, ErrorCode::kInvalidInput,
                 "lifting: delta must be > 0");
  }
  KOOPID_CHECK(lifted_state_dim() >= 1, ErrorCode::kInvalidInput,
               "lifting: empty lifted state");
}

LiftingSpec LiftingSpec::identity(int state_dim, int input_dim) {
  LiftingSpec spec;
  spec.state_dim = state_dim;
  spec.input_dim = input_dim;
  spec.monomial_degree = 1;
  spec.rbf_count = 0;
  return spec;
}

Vector poly_features(const Vector& x, int degree) {
  KOOPID_CHECK(degree >= 1, ErrorCode::kInvalidInput,
               "poly_features: degree must be >= 1");
  std::vector<double> out;
  for (int k = 1; k <= degree; ++k) append_monomials(x, k, 0, 1.0, out);
  return Eigen::Map<Vector>(out.data(), static_cast<Eigen::Index>(out.size()));
}

std::vector<Vector> sample_centers(const Matrix& train_poly_features,
                                   int rbf_count, std::uint64_t seed) {
  KOOPID_CHECK(rbf_count >= 1, ErrorCode::kInvalidInput,
               "sample_centers: rbf_count must be >= 1");
  KOOPID_CHECK(train_poly_features.rows() > 0 && train_poly_features.cols() > 0,
               ErrorCode::kInvalidInput, "sample_centers: empty training data");
  KOOPID_CHECK(train_poly_features.allFinite(), ErrorCode::kInvalidInput,
               "sample_centers: non-finite training data");
  const Eigen::Index d = train_poly_features.rows();
  const Vector lo = train_poly_features.rowwise().minCoeff();
  const Vector hi = train_poly_features.rowwise().maxCoeff();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vector> centers(rbf_count, Vector::Zero(d));
  std::vector<int> bins(rbf_count);
  for (Eigen::Index axis = 0; axis < d; ++axis) {
    std::iota(bins.begin(), bins.end(), 0);
    std::shuffle(bins.begin(), bins.end(), rng);
    for (int i = 0; i < rbf_count; ++i) {
      const double frac = (bins[i] + unit(rng)) / rbf_count;
      centers[i](axis) = lo(axis) + frac * (hi(axis) - lo(axis));
    }
  }
  return centers;
}

double thin_plate(double distance, double alpha, double delta) {
  const double r = alpha * distance + delta;
  return r * r * std::log(r);
}

Vector lift_state(const LiftingSpec& spec, const Vector& x) {
  KOOPID_CHECK(x.size() == spec.state_dim, ErrorCode::kDimension,
               "lift_state: state length " + std::to_string(x.size()) +
                   " != " + std::to_string(spec.state_dim));
  const Vector poly = poly_features(x, spec.monomial_degree);
  Vector out(spec.lifted_state_dim());
  Eigen::Index k = 0;
  if (spec.include_raw_states) {
    out.head(spec.state_dim) = x;
    k = spec.state_dim;
  }
  const Eigen::Index higher = poly.size() - spec.state_dim;
  out.segment(k, higher) = poly.tail(higher);
  k += higher;
  for (int i = 0; i < spec.rbf_count; ++i) {
    out(k++) = thin_plate((poly - spec.rbf_centers[i]).norm(), spec.alpha,
                          spec.delta);
  }
  return out;
}

Vector lift_input(const LiftingSpec& spec, const Vector& u) {
  KOOPID_CHECK(u.size() == spec.input_dim, ErrorCode::kDimension,
               "lift_input: input length " + std::to_string(u.size()) +
                   " != " + std::to_string(spec.input_dim));
  return u;
}

Vector recover_state(const LiftingSpec& spec, const Vector& lifted) {
  KOOPID_CHECK(spec.include_raw_states, ErrorCode::kUnsupportedRecovery,
               "recover_state: lifting does not include raw states");
  KOOPID_CHECK(lifted.size() >= spec.state_dim, ErrorCode::kDimension,
               "recover_state: lifted vector too short");
  return lifted.head(spec.state_dim);
}

}  // namespace koopid
