// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "koopid/dataset.hpp"
#include "koopid/matlib.hpp"

namespace koopid::testing {

inline Matrix random_matrix(std::mt19937_64& rng, int r, int c,
                            double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = n(rng);
  return M;
}

inline Matrix random_spd(std::mt19937_64& rng, int n, double floor = 0.1) {
  const Matrix G = random_matrix(rng, n, n);
  return G * G.transpose() + floor * Matrix::Identity(n, n);
}

/// Random matrix rescaled to the given spectral radius.
inline Matrix random_with_radius(std::mt19937_64& rng, int n, double radius) {
  Matrix A = random_matrix(rng, n, n);
  return A * (radius / spectral_radius(A));
}

inline double rel_fro(const Matrix& A, const Matrix& B) {
  return (A - B).norm() / B.norm();
}

/// x_{k+1} = A x_k + B u_k from x0 with Gaussian inputs.
inline Episode linear_episode(const Matrix& A, const Matrix& B, const Vector& x0,
                              int steps, std::uint64_t seed,
                              const std::string& id = "000") {
  std::mt19937_64 rng(seed);
  Episode e;
  e.id = id;
  e.dt = 1.0;
  e.states.resize(A.rows(), steps + 1);
  e.inputs = random_matrix(rng, static_cast<int>(B.cols()), steps);
  e.states.col(0) = x0;
  for (int k = 0; k < steps; ++k) {
    e.states.col(k + 1) = A * e.states.col(k) + B * e.inputs.col(k);
  }
  return e;
}

/// Scalar autonomous episode x_{k+1} = a x_k with a zero input channel.
inline Episode scalar_episode(double a, double x0, int steps) {
  Episode e;
  e.id = "000";
  e.dt = 1.0;
  e.states.resize(1, steps + 1);
  e.inputs = Matrix::Zero(1, steps);
  e.states(0, 0) = x0;
  for (int k = 0; k < steps; ++k) e.states(0, k + 1) = a * e.states(0, k);
  return e;
}

}  // namespace koopid::testing
