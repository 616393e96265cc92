// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "koopid/dataset.hpp"
#include "koopid/edmd.hpp"
#include "koopid/error.hpp"
#include "koopid/snapshots.hpp"
#include "test_util.hpp"

using namespace koopid;

namespace {

struct Fit {
  KoopmanModel f, b;
};

Fit fit(const std::vector<Episode>& eps, const LiftingSpec& spec) {
  const SnapshotSet s = build_snapshots(eps, spec);
  return {edmd_forward(gram_forward(s), spec), edmd_backward(gram_backward(s), spec)};
}

GramPair single(const Matrix& lhs, const Matrix& rhs, Direction d) {
  SnapshotSet s;
  s.p_theta = static_cast<int>(lhs.rows());
  s.p_upsilon = static_cast<int>(rhs.rows() - lhs.rows());
  if (d == Direction::kForward) {
    s.theta_plus = lhs;
    s.psi = rhs;
    return gram_forward(s);
  }
  s.theta = lhs;
  s.psi_hat = rhs;
  return gram_backward(s);
}

}  // namespace

TEST_SUITE("edmd") {

TEST_CASE("scalar decay recovered forward and backward") {
  const Episode e = testing::scalar_episode(0.5, 1.0, 50);
  const Fit r = fit({e}, LiftingSpec::identity(1, 1));
  CHECK(std::abs(r.f.A(0, 0) - 0.5) <= 1e-10);
  CHECK(std::abs(r.b.A(0, 0) - 2.0) <= 1e-8);
  CHECK(r.f.direction == Direction::kForward);
  CHECK(r.b.direction == Direction::kBackward);
}

TEST_CASE("scalar system with input") {
  Matrix A = Matrix::Constant(1, 1, 0.5);
  Matrix B = Matrix::Constant(1, 1, 0.2);
  const Episode e = testing::linear_episode(A, B, Vector::Ones(1), 200, 1);
  const Fit r = fit({e}, LiftingSpec::identity(1, 1));
  CHECK(std::abs(r.f.A(0, 0) - 0.5) <= 1e-8);
  CHECK(std::abs(r.f.B(0, 0) - 0.2) <= 1e-8);
  CHECK(std::abs(r.b.A(0, 0) - 2.0) <= 1e-6);
  CHECK(std::abs(r.b.B(0, 0) + 0.4) <= 1e-6);
}

TEST_CASE("rank-one data gives the least-norm solution") {
  Matrix psi(2, 1);
  psi << 1, 1;
  const KoopmanModel f = edmd_forward(
      single(Matrix::Ones(1, 1), psi, Direction::kForward),
      LiftingSpec::identity(1, 1));
  CHECK(f.A(0, 0) == doctest::Approx(0.5));
  CHECK(f.B(0, 0) == doctest::Approx(0.5));
  const KoopmanModel b = edmd_backward(
      single(Matrix::Ones(1, 1), psi, Direction::kBackward),
      LiftingSpec::identity(1, 1));
  CHECK(b.A(0, 0) == doctest::Approx(0.5));
  CHECK(b.B(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("direction tags are enforced") {
  const Episode e = testing::scalar_episode(0.5, 1.0, 10);
  const SnapshotSet s = build_snapshots({e}, LiftingSpec::identity(1, 1));
  CHECK_THROWS_AS(edmd_forward(gram_backward(s), LiftingSpec::identity(1, 1)),
                  Error);
  CHECK_THROWS_AS(edmd_backward(gram_forward(s), LiftingSpec::identity(1, 1)),
                  Error);
}

TEST_CASE("exact inverse identities on noiseless linear data") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const Matrix A = testing::random_with_radius(rng, 3, 0.9);
    const Matrix B = testing::random_matrix(rng, 3, 2);
    std::vector<Episode> eps;
    for (int k = 0; k < 3; ++k) {
      eps.push_back(testing::linear_episode(
          A, B, testing::random_matrix(rng, 3, 1), 60, 100 * t + k));
    }
    const Fit r = fit(eps, LiftingSpec::identity(3, 2));
    CHECK(testing::rel_fro(r.f.A, A) <= 1e-8);
    CHECK(testing::rel_fro(r.f.B, B) <= 1e-8);
    const Matrix Ainv = r.f.A.inverse();
    CHECK(testing::rel_fro(r.b.A, Ainv) <= 1e-6);
    CHECK(testing::rel_fro(r.b.B, -Ainv * r.f.B) <= 1e-6);
  }
}

TEST_CASE("noise shrinks the forward spectral radius on average") {
  DuffingRunConfig c;
  c.episodes = 4;
  c.steps = 500;
  const auto clean = generate_duffing(c);
  const LiftingSpec spec = LiftingSpec::identity(2, 1);
  const double ref = spectral_radius(fit(clean, spec).f.A);
  double sum = 0.0;
  const int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    NoiseSpec ns;
    ns.std_dev = {std::sqrt(2.0) / 10.0};
    ns.seed = static_cast<std::uint64_t>(s);
    sum += spectral_radius(fit(add_noise(clean, ns), spec).f.A);
  }
  CHECK(sum / seeds < ref);
}

TEST_CASE("method names round trip") {
  for (Method m : {Method::kEdmd, Method::kEdmdAs, Method::kFbEdmd,
                   Method::kFbEdmdAs}) {
    CHECK(parse_method(method_name(m)) == m);
  }
  CHECK_FALSE(parse_method("dmd").has_value());
}

}  // TEST_SUITE
