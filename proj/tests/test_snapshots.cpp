// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "koopid/error.hpp"
#include "koopid/snapshots.hpp"
#include "test_util.hpp"

using namespace koopid;
using testing::scalar_episode;

TEST_SUITE("snapshots") {

TEST_CASE("single episode column layout") {
  const Episode e = scalar_episode(0.5, 1.0, 3);
  const LiftingSpec spec = LiftingSpec::identity(1, 1);
  const SnapshotSet s = build_snapshots({e}, spec);
  CHECK(s.q() == 3);
  CHECK(s.p_theta == 1);
  CHECK(s.p_upsilon == 1);
  CHECK(s.psi(0, 0) == 1.0);
  CHECK(s.psi(1, 0) == 0.0);
  CHECK(s.theta_plus(0, 0) == 0.5);
  CHECK(s.theta_plus(0, 1) == 0.25);
  CHECK(s.theta_plus(0, 2) == 0.125);
}

TEST_CASE("episodes never pair across a boundary") {
  Episode a = scalar_episode(0.5, 1.0, 3);
  Episode b = scalar_episode(0.5, 8.0, 3);
  b.id = "001";
  const SnapshotSet s = build_snapshots({a, b}, LiftingSpec::identity(1, 1));
  CHECK(s.q() == 6);
  for (int k = 0; k < 6; ++k) {
    CHECK(s.theta_plus(0, k) == doctest::Approx(0.5 * s.psi(0, k)));
  }
  CHECK(s.psi(0, 3) == 8.0);
}

TEST_CASE("block structure and shared input rows") {
  std::mt19937_64 rng(3);
  Matrix A(2, 2);
  A << 0.9, 0.1, -0.2, 0.8;
  Matrix B(2, 1);
  B << 0.0, 1.0;
  const Episode e = testing::linear_episode(A, B, Vector::Ones(2), 40, 2);
  LiftingSpec spec = LiftingSpec::identity(2, 1);
  spec.monomial_degree = 2;
  const SnapshotSet s = build_snapshots({e}, spec);
  CHECK(s.psi.rows() == 6);
  CHECK(s.psi_hat.topRows(5) == s.theta_plus);
  CHECK(s.psi_hat.bottomRows(1) == s.psi.bottomRows(1));
  CHECK(s.theta == s.psi.topRows(5));
  CHECK(s.psi_hat.cols() == s.q());
  CHECK(s.theta.cols() == s.q());
  CHECK(s.theta_plus.cols() == s.q());
}

TEST_CASE("build_snapshots errors") {
  CHECK_THROWS_AS(build_snapshots({}, LiftingSpec::identity(1, 1)), Error);
  const Episode e = scalar_episode(0.5, 1.0, 3);
  try {
    build_snapshots({e}, LiftingSpec::identity(2, 1));
    FAIL("expected throw");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kDimension);
  }
}

TEST_CASE("gram_forward single-column arithmetic") {
  SnapshotSet s;
  s.psi = Matrix(2, 1);
  s.psi << 1, 0;
  s.theta_plus = Matrix::Constant(1, 1, 0.9);
  s.psi_hat = Matrix(2, 1);
  s.psi_hat << 0.9, 0;
  s.theta = Matrix::Constant(1, 1, 1.0);
  s.p_theta = 1;
  s.p_upsilon = 1;
  const GramPair g = gram_forward(s);
  Matrix eg(1, 2);
  eg << 0.9, 0;
  Matrix eh(2, 2);
  eh << 1, 0, 0, 0;
  CHECK(g.G == eg);
  CHECK(g.H == eh);
  CHECK(g.direction == Direction::kForward);
  const GramPair gb = gram_backward(s);
  CHECK(gb.G == eg);
  CHECK(gb.direction == Direction::kBackward);
}

TEST_CASE("Grams scale quadratically and are symmetric PSD") {
  std::mt19937_64 rng(4);
  SnapshotSet s;
  s.p_theta = 3;
  s.p_upsilon = 2;
  s.psi = testing::random_matrix(rng, 5, 30);
  s.theta_plus = testing::random_matrix(rng, 3, 30);
  s.theta = s.psi.topRows(3);
  s.psi_hat.resize(5, 30);
  s.psi_hat << s.theta_plus, s.psi.bottomRows(2);
  SnapshotSet d = s;
  d.psi *= 2;
  d.theta_plus *= 2;
  d.theta *= 2;
  d.psi_hat *= 2;
  const GramPair g1 = gram_forward(s), g2 = gram_forward(d);
  CHECK(testing::rel_fro(g2.G, 4 * g1.G) < 1e-15);
  CHECK(testing::rel_fro(g2.H, 4 * g1.H) < 1e-15);
  for (const GramPair& g : {gram_forward(s), gram_backward(s)}) {
    CHECK((g.H - g.H.transpose()).norm() <= 1e-14 * g.H.norm());
    Eigen::SelfAdjointEigenSolver<Matrix> es(g.H);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12 * g.H.norm());
  }
}

TEST_CASE("time reversal swaps forward and backward Grams") {
  // Two-step, input-free trajectory and its reversal.
  Episode e;
  e.id = "000";
  e.dt = 1.0;
  e.states.resize(2, 3);
  e.states << 1, 0.3, -0.4, 2, 0.7, 0.1;
  e.inputs = Matrix::Zero(1, 2);
  Episode r = e;
  r.states = e.states.rowwise().reverse().eval();
  const LiftingSpec spec = LiftingSpec::identity(2, 1);
  const GramPair fe = gram_forward(build_snapshots({e}, spec));
  const GramPair br = gram_backward(build_snapshots({r}, spec));
  CHECK(testing::rel_fro(fe.G.leftCols(2), br.G.leftCols(2)) < 1e-15);
  CHECK(testing::rel_fro(fe.H.topLeftCorner(2, 2), br.H.topLeftCorner(2, 2)) <
        1e-15);
}

TEST_CASE("Gram route equals direct pseudoinverse route") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    SnapshotSet s;
    s.p_theta = 4;
    s.p_upsilon = 2;
    s.psi = testing::random_matrix(rng, 6, 40);
    s.theta_plus = testing::random_matrix(rng, 4, 40);
    const GramPair g = gram_forward(s);
    const Matrix gram_route = g.G * pinv(g.H);
    const Matrix direct =
        s.theta_plus * s.psi.completeOrthogonalDecomposition().pseudoInverse();
    CHECK(testing::rel_fro(gram_route, direct) <= 1e-10);
  }
}

}  // TEST_SUITE
