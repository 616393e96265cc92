// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "koopid/matlib.hpp"

namespace koopid::sdp {

/// One nonzero of a symmetric coefficient matrix. Both (row, col) and
/// (col, row) are stored for off-diagonal entries.
struct Entry {
  int row;
  int col;
  double value;
};

/// A linear matrix inequality  F0 + sum_i y_i F_i  >= 0  of size n.
class LmiBlock {
 public:
  LmiBlock(std::string name, int size);

  const std::string& name() const { return name_; }
  int size() const { return size_; }

  /// Adds v to F0(r, c) and F0(c, r).
  void add_constant(int r, int c, double v);
  /// Adds v to F_var(r, c) and F_var(c, r).
  void add_coefficient(int var, int r, int c, double v);

  const Matrix& constant() const { return constant_; }
  /// Sorted by variable index; entries of each variable merged.
  const std::vector<std::pair<int, std::vector<Entry>>>& terms() const;

  /// F0 + sum_i y_i F_i.
  Matrix evaluate(const Vector& y) const;

 private:
  void finalize() const;

  std::string name_;
  int size_;
  Matrix constant_;
  mutable std::vector<std::pair<int, std::vector<Entry>>> terms_;
  mutable bool finalized_ = true;
};

/// minimize c^T y  subject to every block being positive semidefinite.
struct Problem {
  int num_vars = 0;
  Vector objective;
  std::vector<LmiBlock> blocks;

  /// Plain-text dump: block sizes, objective, and every coefficient matrix
  /// as (block, var, row, col, value) triplets with var = -1 for F0.
  void write_text(std::ostream& os) const;
};

struct Settings {
  double feasibility_tol = 1e-9;
  double gap_tol = 1e-9;
  int max_iterations = 100;
  double step_fraction = 0.95;
  /// Per-iteration progress on stderr.
  bool verbose = false;
};

enum class Status { kOptimal, kInfeasible, kMaxIterations, kNumericalFailure };

const char* status_name(Status s);

struct Result {
  Status status = Status::kNumericalFailure;
  Vector y;
  std::vector<Matrix> dual;    // X, one per block
  std::vector<Matrix> slack;   // S = F(y), one per block
  double primal_objective = 0.0;  // c^T y
  double dual_objective = 0.0;    // -<F0, X>
  double gap = 0.0;  // max(<X, S>, |primal - dual|) / (1 + |primal| + |dual|)
  double primal_infeasibility = 0.0;  // ||F(y) - S|| / (1 + ||F0||)
  /// ||c - A(X)|| / (1 + ||c|| + ||sum_ij |F_i(j) X(j)| ||)
  double dual_infeasibility = 0.0;
  int iterations = 0;
  std::string message;
};

/// Infeasible primal-dual path-following interior point method with the HKM
/// search direction and Mehrotra predictor-corrector steps.
Result solve(const Problem& problem, const Settings& settings = {});

}  // namespace koopid::sdp
