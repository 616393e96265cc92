// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "koopid/dataset.hpp"
#include "koopid/edmd.hpp"
#include "koopid/fbcombine.hpp"
#include "koopid/lifting.hpp"
#include "koopid/stability.hpp"

namespace koopid {

struct LiftingOptions {
  int monomial_degree = 2;
  int rbf_count = 10;
  double alpha = 0.1;
  double delta = 0.001;
  bool include_raw_states = true;
  std::uint64_t seed = 0;
};

/// Samples RBF centers over the polynomial features of every state sample in
/// the given episodes.
LiftingSpec build_lifting(const std::vector<Episode>& episodes,
                          const LiftingOptions& opts);

struct IdentifyOptions {
  StabilityConfig stability;
  double pinv_tol = kDefaultPinvTol;
  double condition_cap = kDefaultConditionCap;
};

struct IdentifyResult {
  KoopmanModel model;
  std::optional<KoopmanModel> forward;   // fb methods
  std::optional<KoopmanModel> backward;  // fb methods
  std::optional<StabilitySolution> stability;
  std::optional<CombineReport> combine;
  int snapshots = 0;
};

IdentifyResult identify(Method method, const std::vector<Episode>& episodes,
                        const LiftingSpec& spec,
                        const IdentifyOptions& opts = {});

}  // namespace koopid
