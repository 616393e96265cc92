// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "koopid/pipeline.hpp"
#include "koopid/rollout.hpp"

namespace koopid {

struct SweepConfig {
  std::vector<Episode> clean;  // training episodes without added noise
  LiftingSpec spec;
  std::vector<Method> methods;
  std::vector<double> snr_db;  // +inf allowed (no added noise)
  std::vector<std::uint64_t> seeds;
  IdentifyOptions identify;
  int threads = 0;
};

struct SweepRow {
  Method method = Method::kEdmd;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  double err_full = 0.0;
  double err_A = 0.0;
  double err_B = 0.0;
  double spectral_radius = 0.0;
  std::string status;  // "ok" or "error:<code>"
};

/// Seed of the noise draw for one (seed, SNR level) cell.
std::uint64_t cell_noise_seed(std::uint64_t seed, int snr_index);

/// One row per (method, SNR, seed), in that nesting order. Errors are
/// measured against the same method identified on the clean episodes.
/// Failing cells are recorded, never thrown.
std::vector<SweepRow> snr_sweep(const SweepConfig& cfg);

/// method,snr_db,seed,err_full,err_A,err_B,spectral_radius,status
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace koopid
