// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include "koopid/matlib.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "koopid/error.hpp"

namespace koopid {

namespace {

constexpr int kSchurIterationsPerRow = 60;

void require_finite(const Matrix& M, const char* what) {
  KOOPID_CHECK(M.size() > 0, ErrorCode::kInvalidInput,
               std::string(what) + ": empty matrix");
  KOOPID_CHECK(all_finite(M), ErrorCode::kInvalidInput,
               std::string(what) + ": non-finite entry");
}

void require_square(const Matrix& M, const char* what) {
  KOOPID_CHECK(M.rows() == M.cols(), ErrorCode::kDimension,
               std::string(what) + ": expected square matrix, got " +
                   std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
}

}  // namespace

bool all_finite(const Matrix& M) { return M.array().isFinite().all(); }

bool is_symmetric(const Matrix& M, double rel_tol) {
  if (M.rows() != M.cols()) return false;
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  return (M - M.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Matrix pinv(const Matrix& M, double rel_tol) {
  require_finite(M, "pinv");
  KOOPID_CHECK(rel_tol > 0.0, ErrorCode::kInvalidInput,
               "pinv: rel_tol must be positive");
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? rel_tol * s(0) : 0.0;
  Vector s_inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) s_inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
}

ComplexSchurFactors schur_complex(const Matrix& M) {
  require_finite(M, "schur_complex");
  require_square(M, "schur_complex");
  const Eigen::Index n = M.rows();
  const Eigen::Index max_iter = kSchurIterationsPerRow * n;
  Eigen::ComplexSchur<ComplexMatrix> schur(n);
  schur.setMaxIterations(max_iter);
  schur.compute(M.cast<std::complex<double>>(), true);
  KOOPID_CHECK(schur.info() == Eigen::Success, ErrorCode::kNumeric,
               "schur_complex: QR iteration did not converge after " +
                   std::to_string(max_iter) + " iterations");
  ComplexSchurFactors out{schur.matrixU(), schur.matrixT()};
  // Eigen leaves roundoff below the diagonal untouched in some paths.
  out.T.triangularView<Eigen::StrictlyLower>().setZero();
  return out;
}

ComplexVector eigenvalues(const Matrix& M) {
  return schur_complex(M).T.diagonal();
}

ComplexMatrix sqrtm_triangular(const ComplexMatrix& T) {
  const Eigen::Index n = T.rows();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  ComplexMatrix S = ComplexMatrix::Zero(n, n);
  double diag_scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    S(i, i) = std::sqrt(T(i, i));
    diag_scale = std::max(diag_scale, std::abs(S(i, i)));
  }
  const double t_scale = std::max(T.norm(), std::numeric_limits<double>::min());
  // Superdiagonals in order of distance from the diagonal so every S_ik, S_kj
  // on the right-hand side is already known.
  for (Eigen::Index d = 1; d < n; ++d) {
    for (Eigen::Index i = 0; i + d < n; ++i) {
      const Eigen::Index j = i + d;
      std::complex<double> rhs = T(i, j);
      for (Eigen::Index k = i + 1; k < j; ++k) rhs -= S(i, k) * S(k, j);
      const std::complex<double> divisor = S(i, i) + S(j, j);
      if (std::abs(divisor) <= 64.0 * eps * std::max(diag_scale, 1e-300)) {
        if (std::abs(rhs) <= 64.0 * eps * t_scale) {
          S(i, j) = 0.0;
          continue;
        }
        throw Error(ErrorCode::kNoPrincipalRoot,
                    "sqrtm: S_ii + S_jj = 0 at (" + std::to_string(i) + ", " +
                        std::to_string(j) + "); no principal square root");
      }
      S(i, j) = rhs / divisor;
    }
  }
  return S;
}

SqrtmResult sqrtm_detailed(const Matrix& M, double imag_tol) {
  require_square(M, "sqrtm");
  const ComplexSchurFactors f = schur_complex(M);
  const ComplexMatrix S = sqrtm_triangular(f.T);
  const ComplexMatrix R = f.Q * S * f.Q.adjoint();
  SqrtmResult out;
  out.root = R.real();
  out.discarded_imag = R.imag().cwiseAbs().maxCoeff();
  const double scale = R.norm();
  if (out.discarded_imag > imag_tol * std::max(scale, 1e-300)) {
    throw Error(ErrorCode::kComplexRoot,
                "sqrtm: principal root is complex (imaginary magnitude " +
                    std::to_string(out.discarded_imag) + " vs norm " +
                    std::to_string(scale) + ")");
  }
  return out;
}

Matrix sqrtm(const Matrix& M, double imag_tol) {
  return sqrtm_detailed(M, imag_tol).root;
}

double spectral_radius(const Matrix& M) {
  return eigenvalues(M).cwiseAbs().maxCoeff();
}

double min_eig_modulus(const Matrix& M) {
  return eigenvalues(M).cwiseAbs().minCoeff();
}

double spectral_norm(const Matrix& M) {
  require_finite(M, "spectral_norm");
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

double lambda_max_sym(const Matrix& M) {
  require_square(M, "lambda_max_sym");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double lambda_min_sym(const Matrix& M) {
  require_square(M, "lambda_min_sym");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace koopid
