// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "koopid/dataset.hpp"
#include "koopid/lifting.hpp"
#include "koopid/matlib.hpp"

namespace koopid {

enum class Direction { kForward, kBackward };

const char* direction_name(Direction d);

/// Lifted snapshot matrices. Columns are the pairs (k, k+1) of every
/// episode; no pair crosses an episode boundary.
///   psi        = [theta(x_k); upsilon(u_k)]      p x q
///   theta_plus = theta(x_{k+1})                  p_theta x q
///   psi_hat    = [theta(x_{k+1}); upsilon(u_k)]  p x q
///   theta      = theta(x_k)                      p_theta x q
struct SnapshotSet {
  Matrix psi;
  Matrix theta_plus;
  Matrix psi_hat;
  Matrix theta;
  int p_theta = 0;
  int p_upsilon = 0;

  int q() const { return static_cast<int>(psi.cols()); }
};

struct GramPair {
  Matrix G;  // p_theta x p
  Matrix H;  // p x p
  Direction direction = Direction::kForward;
};

SnapshotSet build_snapshots(const std::vector<Episode>& episodes,
                            const LiftingSpec& spec);

/// G = theta_plus psi^T / q, H = psi psi^T / q.
GramPair gram_forward(const SnapshotSet& s);

/// G = theta psi_hat^T / q, H = psi_hat psi_hat^T / q.
GramPair gram_backward(const SnapshotSet& s);

}  // namespace koopid
