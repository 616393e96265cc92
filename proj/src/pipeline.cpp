// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include "koopid/pipeline.hpp"

#include "koopid/error.hpp"
#include "koopid/snapshots.hpp"

namespace koopid {

LiftingSpec build_lifting(const std::vector<Episode>& episodes,
                          const LiftingOptions& opts) {
  KOOPID_CHECK(!episodes.empty(), ErrorCode::kInvalidInput,
               "build_lifting: no episodes");
  LiftingSpec spec;
  spec.state_dim = episodes.front().state_dim();
  spec.input_dim = episodes.front().input_dim();
  spec.monomial_degree = opts.monomial_degree;
  spec.rbf_count = opts.rbf_count;
  spec.alpha = opts.alpha;
  spec.delta = opts.delta;
  spec.include_raw_states = opts.include_raw_states;
  spec.center_seed = opts.seed;
  if (opts.rbf_count > 0) {
    Eigen::Index total = 0;
    for (const Episode& e : episodes) total += e.states.cols();
    Matrix feats(spec.poly_feature_count(), total);
    Eigen::Index col = 0;
    for (const Episode& e : episodes) {
      KOOPID_CHECK(e.state_dim() == spec.state_dim, ErrorCode::kDimension,
                   "build_lifting: episodes differ in state dimension");
      for (Eigen::Index k = 0; k < e.states.cols(); ++k) {
        feats.col(col++) = poly_features(e.states.col(k), spec.monomial_degree);
      }
    }
    spec.rbf_centers = sample_centers(feats, opts.rbf_count, opts.seed);
  }
  spec.validate();
  return spec;
}

IdentifyResult identify(Method method, const std::vector<Episode>& episodes,
                        const LiftingSpec& spec, const IdentifyOptions& opts) {
  const SnapshotSet s = build_snapshots(episodes, spec);
  const GramPair gf = gram_forward(s);
  IdentifyResult out;
  out.snapshots = s.q();

  const auto epsilon = [&] {
    return opts.stability.epsilon ? *opts.stability.epsilon
                                  : auto_epsilon(gf, s.q(), opts.pinv_tol);
  };

  switch (method) {
    case Method::kEdmd:
      out.model = edmd_forward(gf, spec, opts.pinv_tol);
      break;
    case Method::kEdmdAs: {
      StabilitySolution sol = solve_forward_as(gf, s.p_theta, s.p_upsilon,
                                               epsilon(), opts.stability);
      out.model.A = sol.A_ff;
      out.model.B = sol.B_ff;
      out.model.spec = spec;
      out.model.method = Method::kEdmdAs;
      out.stability = std::move(sol);
      break;
    }
    case Method::kFbEdmd: {
      const GramPair gb = gram_backward(s);
      out.forward = edmd_forward(gf, spec, opts.pinv_tol);
      out.backward = edmd_backward(gb, spec, opts.pinv_tol);
      FbModel fb = build_fb_model(*out.forward, *out.backward, opts.condition_cap);
      out.model = std::move(fb.model);
      out.combine = std::move(fb.report);
      break;
    }
    case Method::kFbEdmdAs: {
      const GramPair gb = gram_backward(s);
      StabilitySolution sol = solve_combined(gf, gb, s.p_theta, s.p_upsilon,
                                             epsilon(), opts.stability);
      KoopmanModel f, b;
      f.A = sol.A_ff;
      f.B = sol.B_ff;
      f.spec = spec;
      f.method = Method::kEdmdAs;
      f.direction = Direction::kForward;
      b.A = sol.A_bb;
      b.B = sol.B_bb;
      b.spec = spec;
      b.method = Method::kEdmdAs;
      b.direction = Direction::kBackward;
      FbModel fb = build_fb_model(f, b, opts.condition_cap);
      out.model = std::move(fb.model);
      out.combine = std::move(fb.report);
      out.forward = std::move(f);
      out.backward = std::move(b);
      out.stability = std::move(sol);
      break;
    }
  }
  out.model.validate();
  return out;
}

}  // namespace koopid
