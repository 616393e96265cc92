// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include "koopid/snapshots.hpp"

#include "koopid/error.hpp"

namespace koopid {

const char* direction_name(Direction d) {
  return d == Direction::kForward ? "forward" : "backward";
}

SnapshotSet build_snapshots(const std::vector<Episode>& episodes,
                            const LiftingSpec& spec) {
  KOOPID_CHECK(!episodes.empty(), ErrorCode::kInvalidInput,
               "build_snapshots: no episodes");
  spec.validate();
  Eigen::Index q = 0;
  for (const Episode& e : episodes) {
    KOOPID_CHECK(e.state_dim() == spec.state_dim &&
                     e.input_dim() == spec.input_dim,
                 ErrorCode::kDimension,
                 "build_snapshots: episode " + e.id +
                     " dimensions do not match the lifting");
    KOOPID_CHECK(e.states.cols() >= 2 && e.states.cols() == e.inputs.cols() + 1,
                 ErrorCode::kInvalidInput,
                 "build_snapshots: episode " + e.id + " needs >= 2 samples");
    q += e.inputs.cols();
  }

  const int pt = spec.lifted_state_dim();
  const int pu = spec.lifted_input_dim();
  SnapshotSet s;
  s.p_theta = pt;
  s.p_upsilon = pu;
  s.psi.resize(pt + pu, q);
  s.theta_plus.resize(pt, q);

  Eigen::Index col = 0;
  for (const Episode& e : episodes) {
    const Eigen::Index T = e.inputs.cols();
    Matrix lifted(pt, T + 1);
    for (Eigen::Index k = 0; k <= T; ++k) {
      lifted.col(k) = lift_state(spec, e.states.col(k));
    }
    for (Eigen::Index k = 0; k < T; ++k, ++col) {
      s.psi.col(col).head(pt) = lifted.col(k);
      s.psi.col(col).tail(pu) = lift_input(spec, e.inputs.col(k));
      s.theta_plus.col(col) = lifted.col(k + 1);
    }
  }
  s.theta = s.psi.topRows(pt);
  s.psi_hat.resize(pt + pu, q);
  s.psi_hat.topRows(pt) = s.theta_plus;
  s.psi_hat.bottomRows(pu) = s.psi.bottomRows(pu);
  return s;
}

namespace {

GramPair gram(const Matrix& target, const Matrix& regressor, Direction d) {
  const double q = static_cast<double>(regressor.cols());
  KOOPID_CHECK(q >= 1, ErrorCode::kInvalidInput, "gram: no snapshots");
  GramPair g;
  g.G = target * regressor.transpose() / q;
  g.H.resize(regressor.rows(), regressor.rows());
  g.H.setZero();
  g.H.selfadjointView<Eigen::Lower>().rankUpdate(regressor, 1.0 / q);
  g.H.triangularView<Eigen::StrictlyUpper>() =
      g.H.triangularView<Eigen::StrictlyLower>().transpose();
  g.direction = d;
  return g;
}

}  // namespace

GramPair gram_forward(const SnapshotSet& s) {
  return gram(s.theta_plus, s.psi, Direction::kForward);
}

GramPair gram_backward(const SnapshotSet& s) {
  return gram(s.theta, s.psi_hat, Direction::kBackward);
}

}  // namespace koopid
