// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace koopid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kDefaultPinvTol = 1e-12;
inline constexpr double kDefaultImagTol = 1e-8;

struct ComplexSchurFactors {
  ComplexMatrix Q;  // unitary
  ComplexMatrix T;  // upper triangular, eigenvalues on the diagonal
};

/// Principal square root together with what was dropped when going back to a
/// real matrix.
struct SqrtmResult {
  Matrix root;
  /// Largest |imag| entry of the back-transformed root.
  double discarded_imag = 0.0;
};

/// Moore-Penrose pseudoinverse via SVD. Singular values below
/// rel_tol * sigma_max are treated as zero.
Matrix pinv(const Matrix& M, double rel_tol = kDefaultPinvTol);

/// M = Q T Q^H with Q unitary and T upper triangular.
ComplexSchurFactors schur_complex(const Matrix& M);

/// Eigenvalues read off the complex Schur diagonal.
ComplexVector eigenvalues(const Matrix& M);

/// Principal matrix square root by Schur triangularization and the
/// element-wise triangular recursion S_ii^2 = T_ii,
/// S_ii S_ij + S_ij S_jj = T_ij - sum_{k=i+1}^{j-1} S_ik S_kj.
Matrix sqrtm(const Matrix& M, double imag_tol = kDefaultImagTol);
SqrtmResult sqrtm_detailed(const Matrix& M, double imag_tol = kDefaultImagTol);

/// Square root of an upper triangular complex matrix (the recursion alone).
ComplexMatrix sqrtm_triangular(const ComplexMatrix& T);

double spectral_radius(const Matrix& M);
double spectral_norm(const Matrix& M);
double min_eig_modulus(const Matrix& M);

/// Extreme eigenvalues of the symmetric part (M + M^T) / 2.
double lambda_max_sym(const Matrix& M);
double lambda_min_sym(const Matrix& M);

bool is_symmetric(const Matrix& M, double rel_tol = 1e-10);
bool all_finite(const Matrix& M);

}  // namespace koopid
