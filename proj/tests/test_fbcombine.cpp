// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "koopid/error.hpp"
#include "koopid/fbcombine.hpp"
#include "koopid/pipeline.hpp"
#include "oracles.hpp"

using namespace koopid;

namespace {

Matrix diag2(double a, double b) {
  Matrix M = Matrix::Zero(2, 2);
  M(0, 0) = a;
  M(1, 1) = b;
  return M;
}

KoopmanModel make(const Matrix& A, const Matrix& B, Direction d) {
  KoopmanModel m;
  m.A = A;
  m.B = B;
  m.spec = LiftingSpec::identity(static_cast<int>(A.rows()),
                                 static_cast<int>(B.cols()));
  m.direction = d;
  m.method = Method::kEdmd;
  return m;
}

}  // namespace

TEST_SUITE("fbcombine") {

TEST_CASE("combine_A examples") {
  CombineReport rep;
  const Matrix At = combine_A(diag2(0.5, 0.8), diag2(2.0, 1.25), &rep);
  CHECK(testing::rel_fro(At, diag2(0.5, 0.8)) <= 1e-14);
  CHECK(rep.spectral_radius == doctest::Approx(0.8));
  CHECK(rep.sqrt_residual <= 1e-14);
  CHECK(rep.abb_condition == doctest::Approx(1.6));
  const Matrix I = Matrix::Identity(1, 1);
  CHECK(combine_A(I, I) == I);
}

TEST_CASE("square-root residual on random stable pairs") {
  std::mt19937_64 rng(81);
  for (int t = 0; t < 50; ++t) {
    // Positive spectra keep the product clear of the negative axis.
    const Matrix V = testing::random_matrix(rng, 3, 3) + 3 * Matrix::Identity(3, 3);
    std::uniform_real_distribution<double> u(0.2, 0.95);
    Vector d(3);
    d << u(rng), u(rng), u(rng);
    const Matrix A = V * d.asDiagonal() * V.inverse();
    const Matrix Abb = (A + 0.01 * testing::random_matrix(rng, 3, 3)).inverse();
    CombineReport rep;
    const Matrix At = combine_A(A, Abb, &rep);
    const Matrix prod = A * Abb.inverse();
    CHECK((At * At - prod).norm() <= 1e-9 * prod.norm());
    CHECK(rep.sqrt_residual <= 1e-9);
    CHECK(rep.spectral_radius == doctest::Approx(spectral_radius(At)));
  }
}

TEST_CASE("combine_A error paths") {
  try {
    combine_A(Matrix::Identity(2, 2), diag2(1.0, 1e-14));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConditioning);
  }
  try {
    combine_A(Matrix::Identity(2, 2), diag2(-1.0, 1.0));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kComplexRoot);
  }
  CHECK_THROWS_AS(combine_A(Matrix::Identity(2, 2), Matrix::Identity(3, 3)),
                  Error);
}

TEST_CASE("combine_B on consistent data returns B") {
  std::mt19937_64 rng(82);
  for (int t = 0; t < 50; ++t) {
    const Matrix A = testing::random_with_radius(rng, 3, 0.9);
    const Matrix B = testing::random_matrix(rng, 3, 2);
    const Matrix Ainv = A.inverse();
    const Matrix Bbb = -Ainv * B;
    CombineReport rep;
    // Use A itself as the square root so the check isolates combine_B.
    const Matrix Bt = combine_B(A, A, B, Ainv, Bbb, &rep);
    CHECK(testing::rel_fro(Bt, B) <= 1e-8);
    CHECK_FALSE(rep.rank_deficient);
  }
  const Matrix I = Matrix::Identity(2, 2);
  CHECK(combine_B(0.5 * I, 0.5 * I, Matrix::Zero(2, 1), 2 * I,
                  Matrix::Zero(2, 1))
            .isZero());
}

TEST_CASE("combine_B flags a rank-deficient 1 + A") {
  CombineReport rep;
  const Matrix At = diag2(-1.0, 0.5);
  Matrix B(2, 1);
  B << 1.0, 1.0;
  const Matrix out = combine_B(At, diag2(1.0, 0.25), B, diag2(1.0, 2.0),
                               Matrix::Zero(2, 1), &rep);
  CHECK(rep.rank_deficient);
  CHECK(out.allFinite());
}

TEST_CASE("exact forward/backward pair is a fixed point") {
  std::mt19937_64 rng(83);
  for (int t = 0; t < 50; ++t) {
    const Matrix V = testing::random_matrix(rng, 3, 3) + 3 * Matrix::Identity(3, 3);
    std::uniform_real_distribution<double> u(0.1, 0.95);
    Vector d(3);
    d << u(rng), u(rng), u(rng);
    const Matrix A = V * d.asDiagonal() * V.inverse();
    const Matrix B = testing::random_matrix(rng, 3, 1);
    const FbModel fb =
        build_fb_model(make(A, B, Direction::kForward),
                       make(A.inverse(), -A.inverse() * B, Direction::kBackward));
    CHECK(testing::rel_fro(fb.model.A, A) <= 1e-8);
    CHECK(testing::rel_fro(fb.model.B, B) <= 1e-8);
    CHECK(fb.model.method == Method::kFbEdmd);
    // One-step map on lifted states.
    const Vector x = testing::random_matrix(rng, 3, 1);
    const Vector u1 = testing::random_matrix(rng, 1, 1);
    CHECK((fb.model.A * x + fb.model.B * u1 - (A * x + B * u1)).norm() <=
          1e-8 * (A * x + B * u1).norm());
  }
}

TEST_CASE("build_fb_model checks its inputs") {
  const Matrix I = Matrix::Identity(2, 2);
  const Matrix b = Matrix::Zero(2, 1);
  CHECK_THROWS_AS(build_fb_model(make(I, b, Direction::kForward),
                                 make(I, b, Direction::kForward)),
                  Error);
  try {
    build_fb_model(make(I, b, Direction::kForward),
                   make(Matrix::Identity(3, 3), Matrix::Zero(3, 1),
                        Direction::kBackward));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimension);
  }
  KoopmanModel f = make(0.5 * I, b, Direction::kForward);
  f.method = Method::kEdmdAs;
  KoopmanModel bw = make(2.0 * I, b, Direction::kBackward);
  bw.method = Method::kEdmdAs;
  CHECK(build_fb_model(f, bw).model.method == Method::kFbEdmdAs);
}

TEST_CASE("stability is preserved on random feasible triples") {
  std::mt19937_64 rng(84);
  std::uniform_int_distribution<int> dim(1, 5);
  int combined = 0, drawn = 0;
  while (combined < 200 && drawn < 5000) {
    ++drawn;
    const testing::FeasibleTriple tr = testing::random_feasible_triple(rng, dim(rng));
    REQUIRE(check_forward_lmi(tr.A_ff, tr.P, tr.rho) < 0);
    REQUIRE(check_backward_lmi(tr.A_bb, tr.P, tr.rho).quadratic > 0);
    try {
      const Matrix At = combine_A(tr.A_ff, tr.A_bb);
      CHECK(testing::max_modulus_oracle(At) <= tr.rho + 1e-6);
      ++combined;
    } catch (const Error& e) {
      // A product with negative real eigenvalues has no real principal root.
      CHECK(e.code() == ErrorCode::kComplexRoot);
    }
  }
  CHECK(combined == 200);
}

TEST_CASE("combined solution of a noisy scalar system is certified") {
  Matrix A = Matrix::Constant(1, 1, 0.95);
  Matrix B = Matrix::Constant(1, 1, 0.3);
  std::vector<Episode> eps;
  for (int k = 0; k < 3; ++k) {
    eps.push_back(testing::linear_episode(A, B, Vector::Ones(1), 200, 90 + k,
                                          "00" + std::to_string(k)));
  }
  NoiseSpec ns;
  ns.std_dev = {0.3};
  ns.seed = 4;
  IdentifyOptions opts;
  opts.stability.rho_bar = 0.9;
  const IdentifyResult r = identify(Method::kFbEdmdAs, add_noise(eps, ns),
                                    LiftingSpec::identity(1, 1), opts);
  REQUIRE(r.stability.has_value());
  CHECK(spectral_radius(r.model.A) <= 0.9 + 1e-6);
  CHECK(r.stability->forward_lmi_margin <= 1e-9);
  CHECK(r.stability->backward_quadratic_margin > -1e-9);
}

}  // TEST_SUITE
