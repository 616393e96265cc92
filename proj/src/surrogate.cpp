// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include "koopid/surrogate.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "koopid/error.hpp"

namespace koopid {

namespace {

Matrix chamber_directions() {
  Matrix D(2, 3);
  for (int i = 0; i < 3; ++i) {
    const double ang = 2.0 * std::numbers::pi * i / 3.0;
    D(0, i) = std::cos(ang);
    D(1, i) = std::sin(ang);
  }
  return D;
}

}  // namespace

Vector surrogate_step(const SurrogateConfig& cfg, const Vector& x,
                      const Vector& u) {
  KOOPID_CHECK(x.size() == 2 && u.size() == 3, ErrorCode::kDimension,
               "surrogate_step: expected 2 states and 3 inputs");
  const double c = std::cos(cfg.rotation);
  const double s = std::sin(cfg.rotation);
  const Vector z = x / cfg.scale;
  Vector rz(2);
  rz << c * z(0) - s * z(1), s * z(0) + c * z(1);
  const Vector next = cfg.decay * rz + cfg.gain * (chamber_directions() * u) -
                      cfg.cubic * z.squaredNorm() * z;
  return cfg.scale * next;
}

EpisodeSet generate_surrogate(const SurrogateConfig& cfg) {
  KOOPID_CHECK(cfg.steps >= 2 && cfg.hold >= 1 && cfg.dt > 0.0 &&
                   cfg.scale > 0.0,
               ErrorCode::kInvalidInput, "surrogate: invalid configuration");
  KOOPID_CHECK(cfg.train_episodes >= 1 && cfg.test_episodes >= 0,
               ErrorCode::kInvalidInput, "surrogate: invalid episode counts");
  EpisodeSet set;
  set.dt = cfg.dt;
  set.state_dim = 2;
  set.input_dim = 3;
  const int total = cfg.train_episodes + cfg.test_episodes;
  for (int ep = 0; ep < total; ++ep) {
    std::seed_seq seq{cfg.seed, static_cast<std::uint64_t>(ep),
                      std::uint64_t{0x50F7}};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Episode e;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%03d", ep);
    e.id = buf;
    e.dt = cfg.dt;
    e.states.resize(2, cfg.steps + 1);
    e.inputs.resize(3, cfg.steps);
    Vector x = Vector::Zero(2);
    Vector u(3);
    e.states.col(0) = x;
    for (int k = 0; k < cfg.steps; ++k) {
      if (k % cfg.hold == 0) {
        for (int i = 0; i < 3; ++i) u(i) = unit(rng);
      }
      e.inputs.col(k) = u;
      x = surrogate_step(cfg, x, u);
      if (!x.allFinite()) {
        throw Error(ErrorCode::kSimulationDiverged,
                    "surrogate: episode " + e.id + " diverged at step " +
                        std::to_string(k + 1));
      }
      e.states.col(k + 1) = x;
    }
    set.episodes.push_back(std::move(e));
    set.roles.push_back(ep < cfg.train_episodes ? "train" : "test");
  }
  return set;
}

}  // namespace koopid
