// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <set>

#include "koopid/error.hpp"
#include "koopid/lifting.hpp"
#include "test_util.hpp"

using namespace koopid;

namespace {

LiftingSpec duffing_like_spec(std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  const Matrix X = testing::random_matrix(rng, 2, 200);
  Matrix feats(5, X.cols());
  for (Eigen::Index k = 0; k < X.cols(); ++k) feats.col(k) = poly_features(X.col(k));
  LiftingSpec s;
  s.state_dim = 2;
  s.input_dim = 1;
  s.rbf_count = 10;
  s.rbf_centers = sample_centers(feats, 10, seed);
  s.center_seed = seed;
  return s;
}

}  // namespace

TEST_SUITE("lifting") {

TEST_CASE("poly_features examples") {
  CHECK(poly_features(Vector::Zero(2)).isZero());
  CHECK(poly_features(Vector::Zero(2)).size() == 5);
  Vector x1(1);
  x1 << 3;
  Vector e1(2);
  e1 << 3, 9;
  CHECK(poly_features(x1) == e1);
  Vector x2(2);
  x2 << 1, 2;
  Vector e2(5);
  e2 << 1, 2, 1, 2, 4;
  CHECK(poly_features(x2) == e2);
}

TEST_CASE("sample_centers: containment, determinism, stratification") {
  Matrix box(2, 2);
  box << 0, 1, 0, 1;
  const auto one = sample_centers(box, 1, 3);
  REQUIRE(one.size() == 1);
  CHECK((one[0].array() >= 0.0).all());
  CHECK((one[0].array() <= 1.0).all());

  std::mt19937_64 rng(7);
  const Matrix F = testing::random_matrix(rng, 2, 50);
  const auto a = sample_centers(F, 10, 42);
  const auto b = sample_centers(F, 10, 42);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  for (int d = 0; d < 2; ++d) {
    const double lo = F.row(d).minCoeff();
    const double hi = F.row(d).maxCoeff();
    std::set<int> bins;
    for (const Vector& c : a) {
      int bin = static_cast<int>(std::floor((c(d) - lo) / (hi - lo) * 10.0));
      bins.insert(std::min(bin, 9));
    }
    CHECK(bins.size() == 10);
  }
  CHECK_THROWS_AS(sample_centers(Matrix(0, 0), 3, 1), Error);
}

TEST_CASE("thin-plate entry at a center is delta^2 ln delta") {
  LiftingSpec s = duffing_like_spec();
  s.rbf_centers[0] = poly_features(Vector::Ones(2));
  const Vector t = lift_state(s, Vector::Ones(2));
  CHECK(t(5) == doctest::Approx(s.delta * s.delta * std::log(s.delta)));
}

TEST_CASE("thin-plate value at distance 10 with default constants") {
  const double r = 0.1 * 10.0 + 0.001;
  CHECK(thin_plate(10.0, 0.1, 0.001) == doctest::Approx(r * r * std::log(r)));
  CHECK(thin_plate(10.0, 0.1, 0.001) == doctest::Approx(1.001 * 1.001 * std::log(1.001)));
}

TEST_CASE("lifted layout and dimensions") {
  const LiftingSpec s = duffing_like_spec();
  CHECK(s.poly_feature_count() == 5);
  CHECK(s.lifted_state_dim() == 2 + 3 + 10);
  CHECK(s.lifted_input_dim() == 1);
  Vector x(2);
  x << 0.3, -1.7;
  const Vector t = lift_state(s, x);
  CHECK(t.size() == 15);
  CHECK(t.head(2) == x);
  CHECK(t(2) == doctest::Approx(0.09));
  CHECK(t(4) == doctest::Approx(1.7 * 1.7));
}

TEST_CASE("lift_input is the identity") {
  const LiftingSpec s = LiftingSpec::identity(1, 2);
  Vector u(2);
  u << 1.5, -2;
  CHECK(lift_input(s, u) == u);
  CHECK(lift_input(s, Vector::Zero(2)) == Vector::Zero(2));
  CHECK_THROWS_AS(lift_input(s, Vector::Zero(3)), Error);
}

TEST_CASE("recover_state round trip is exact") {
  const LiftingSpec s = duffing_like_spec();
  std::mt19937_64 rng(9);
  for (int t = 0; t < 200; ++t) {
    const Vector x = testing::random_matrix(rng, 2, 1, 10.0);
    CHECK(recover_state(s, lift_state(s, x)) == x);
  }
  Vector th = Vector::Zero(15);
  th(0) = 1;
  th(1) = -1;
  Vector e(2);
  e << 1, -1;
  CHECK(recover_state(s, th) == e);
}

TEST_CASE("recover_state without raw states is unsupported") {
  LiftingSpec s = LiftingSpec::identity(2, 1);
  s.include_raw_states = false;
  s.monomial_degree = 2;
  try {
    recover_state(s, Vector::Zero(3));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupportedRecovery);
  }
}

TEST_CASE("lift_state rejects wrong lengths") {
  const LiftingSpec s = duffing_like_spec();
  try {
    lift_state(s, Vector::Zero(3));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimension);
  }
}

TEST_CASE("lift is finite everywhere and continuous") {
  const LiftingSpec s = duffing_like_spec();
  std::mt19937_64 rng(10);
  for (int t = 0; t < 200; ++t) {
    const Vector x = testing::random_matrix(rng, 2, 1, 3.0);
    const Vector a = lift_state(s, x);
    CHECK(a.allFinite());
    Vector xp = x;
    xp(t % 2) += 1e-10;
    CHECK((lift_state(s, xp) - a).norm() <= 1e-6);
  }
}

TEST_CASE("spec validation") {
  LiftingSpec s = duffing_like_spec();
  s.alpha = 0.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = duffing_like_spec();
  s.rbf_centers[2] = Vector::Zero(4);
  CHECK_THROWS_AS(s.validate(), Error);
  s = duffing_like_spec();
  s.rbf_centers.pop_back();
  CHECK_THROWS_AS(s.validate(), Error);
}

}  // TEST_SUITE
