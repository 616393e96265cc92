// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "koopid/matlib.hpp"

namespace koopid {

/// One contiguous trajectory: states m x (T+1), inputs n x T.
struct Episode {
  std::string id;
  double dt = 0.0;
  Matrix states;
  Matrix inputs;

  int state_dim() const { return static_cast<int>(states.rows()); }
  int input_dim() const { return static_cast<int>(inputs.rows()); }
  int steps() const { return static_cast<int>(inputs.cols()); }

  void validate() const;
};

struct DuffingParams {
  double mass = 0.1;         // kg
  double damping = 0.01;     // N s / m
  double k_linear = 0.1;     // N / m
  double k_cubic = 0.001;    // N / m^3
  double dt = 0.01;          // s
};

enum class ForcingKind { kZero, kSinusoid, kRandom };

/// Excitation applied during simulation. kRandom is a multisine with
/// seeded frequencies in [0.1, max_frequency] rad/s and random phases, scaled
/// so its RMS equals amplitude / sqrt(2).
struct ForcingSpec {
  ForcingKind kind = ForcingKind::kRandom;
  double amplitude = 0.1;      // N
  double frequency = 1.0;      // rad/s, kSinusoid
  double max_frequency = 3.0;  // rad/s, kRandom
  int components = 5;          // kRandom
};

struct DuffingRunConfig {
  DuffingParams params;
  ForcingSpec forcing;
  int steps = 1000;
  int episodes = 22;
  std::uint64_t seed = 0;
  /// Per-episode x0 ~ U[-x0_box, x0_box]^2 unless fixed_x0 is set.
  double x0_box = 1.0;
  bool use_fixed_x0 = false;
  Vector fixed_x0 = Vector::Zero(2);
};

/// One forward-Euler step of m x'' + c x' + k1 x + k2 x^3 = f.
Vector duffing_step(const DuffingParams& p, const Vector& x, double force);

/// Mechanical energy 1/2 m v^2 + 1/2 k1 x^2 + 1/4 k2 x^4.
double duffing_energy(const DuffingParams& p, const Vector& x);

/// Noise-free Duffing episodes, ids "000", "001", ...
std::vector<Episode> generate_duffing(const DuffingRunConfig& cfg);

struct NoiseSpec {
  /// One standard deviation per state channel, or a single value for all.
  std::vector<double> std_dev{0.0};
  std::uint64_t seed = 0;
};

/// Adds i.i.d. N(0, sigma^2) to every state entry; inputs are left untouched.
Episode add_noise(const Episode& e, const NoiseSpec& spec);
std::vector<Episode> add_noise(const std::vector<Episode>& es,
                               const NoiseSpec& spec);

inline constexpr double kInfiniteSnr = std::numeric_limits<double>::infinity();

/// 10 log10(var(clean) / var(noisy - clean)), variances pooled over channels.
/// Returns kInfiniteSnr when the noise variance is zero.
double snr_db(const Episode& clean, const Episode& noisy);
double snr_db(const std::vector<Episode>& clean,
              const std::vector<Episode>& noisy);

/// Pooled per-channel state variance across a set of episodes.
double signal_variance(const std::vector<Episode>& episodes);

/// Noise standard deviation that yields target_db against the given data.
double noise_std_for_snr(const std::vector<Episode>& clean, double target_db);

/// Episode set on disk: episode_<id>.csv files plus meta.json.
struct EpisodeSet {
  double dt = 0.0;
  int state_dim = 0;
  int input_dim = 0;
  std::vector<Episode> episodes;
  std::vector<std::string> roles;  // "train" or "test", parallel to episodes

  std::vector<Episode> with_role(const std::string& role) const;
  void validate() const;
};

std::string episode_to_csv(const Episode& e);
Episode episode_from_csv(const std::string& text, const std::string& id);

void write_episode_set(const EpisodeSet& set, const std::filesystem::path& dir);
EpisodeSet read_episode_set(const std::filesystem::path& dir);

/// Canonical "%.17g" rendering used by every CSV writer.
std::string format_double(double v);

}  // namespace koopid
