// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "koopid/dataset.hpp"

namespace koopid {

/// Synthetic stand-in for a three-chamber soft arm: planar tip position
/// driven by three pressures held piecewise constant.
///   z_{k+1} = a R(phi) z_k + b D u_k - c ||z_k||^2 z_k,  x_k = s z_k
/// where D holds unit chamber directions 120 degrees apart.
struct SurrogateConfig {
  double decay = 0.9;       // a
  double rotation = 0.2;    // phi, rad
  double gain = 0.1;        // b
  double cubic = 0.05;      // c
  double scale = 20.0;      // s, output units per model unit
  double dt = 0.05;
  int steps = 1000;
  int hold = 10;            // samples per pressure level
  int train_episodes = 13;
  int test_episodes = 4;
  std::uint64_t seed = 0;
};

Vector surrogate_step(const SurrogateConfig& cfg, const Vector& x,
                      const Vector& u);

/// Train episodes first, then test episodes; ids "000", "001", ...
EpisodeSet generate_surrogate(const SurrogateConfig& cfg);

}  // namespace koopid
