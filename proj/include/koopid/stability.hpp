// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "koopid/sdp.hpp"
#include "koopid/snapshots.hpp"

namespace koopid {

struct StabilityConfig {
  double rho_bar = 0.999;
  /// Floor on P (P - eps 1 > 0). Unset: ||Psi^T (Psi Psi^T)^+||_2.
  std::optional<double> epsilon;
  /// Margin realizing strict inequalities as >= mu 1.
  /// Unset: 1e-7 * max(1, ||H_f||_2).
  std::optional<double> strict_margin;
  double feasibility_tol = 1e-9;
  double gap_tol = 1e-9;
  int max_iterations = 100;
  double pinv_tol = kDefaultPinvTol;
  bool verbose = false;
  /// When non-empty, the assembled conic program is written here.
  std::string dump_path;

  void validate() const;
};

struct ConstraintMargin {
  std::string name;
  double value;  // lambda_min of the constraint's left-hand side
};

struct StabilitySolution {
  bool combined = false;
  Matrix X_f, B_ff, X_b, B_bb, P;
  double gamma = 0.0;
  double nu = 0.0;
  Matrix A_ff, A_bb;
  double epsilon = 0.0;
  double strict_margin = 0.0;
  std::vector<ConstraintMargin> margins;
  /// Solver-independent re-checks on the recovered matrices.
  double forward_lmi_margin = 0.0;            // <= 0 required
  double backward_quadratic_margin = 0.0;     // combined only
  double backward_linearized_margin = 0.0;    // combined only
  std::string solver_status;
  int iterations = 0;
  double gap = 0.0;
  double solve_seconds = 0.0;

  double min_margin() const;
};

/// ||Psi^T (Psi Psi^T)^+||_2 computed from H_f = Psi Psi^T / q.
double auto_epsilon(const GramPair& forward, int q, double pinv_tol = kDefaultPinvTol);

/// Forward-only problem: min gamma over (gamma, X_f, B_ff, P, Z).
StabilitySolution solve_forward_as(const GramPair& gf, int p_theta,
                                   int p_upsilon, double epsilon,
                                   const StabilityConfig& cfg);

/// Forward and backward problems sharing one Lyapunov variable P.
StabilitySolution solve_combined(const GramPair& gf, const GramPair& gb,
                                 int p_theta, int p_upsilon, double epsilon,
                                 const StabilityConfig& cfg);

/// Conic programs as assembled for the solver (exposed for debugging dumps).
sdp::Problem build_forward_as_problem(const GramPair& gf, int p_theta,
                                      int p_upsilon, double epsilon,
                                      double mu, const StabilityConfig& cfg);
sdp::Problem build_combined_problem(const GramPair& gf, const GramPair& gb,
                                    int p_theta, int p_upsilon, double epsilon,
                                    double mu, const StabilityConfig& cfg);

/// lambda_max(A P A^T - rho^2 P); negative means the constraint holds.
double check_forward_lmi(const Matrix& A, const Matrix& P, double rho_bar);

struct BackwardMargins {
  double quadratic;   // lambda_min(A P A^T - P / rho^2)
  double linearized;  // lambda_min(rho A P + rho P A^T - 2 P)
};

BackwardMargins check_backward_lmi(const Matrix& A_bb, const Matrix& P,
                                   double rho_bar);

}  // namespace koopid
