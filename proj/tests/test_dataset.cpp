// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "koopid/dataset.hpp"
#include "koopid/error.hpp"
#include "koopid/io.hpp"
#include "koopid/surrogate.hpp"

using namespace koopid;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("koopid_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("duffing_step examples") {
  const DuffingParams p;
  CHECK(duffing_step(p, v2(0, 0), 0.0) == v2(0, 0));
  const Vector a = duffing_step(p, v2(1, 0), 0.0);
  CHECK(a(0) == doctest::Approx(1.0));
  CHECK(a(1) == doctest::Approx(-0.0101));
  const Vector b = duffing_step(p, v2(0, 1), 0.0);
  CHECK(b(0) == doctest::Approx(0.01));
  CHECK(b(1) == doctest::Approx(0.999));
}

TEST_CASE("generate_duffing: zero forcing at rest stays at rest") {
  DuffingRunConfig c;
  c.forcing.kind = ForcingKind::kZero;
  c.use_fixed_x0 = true;
  c.fixed_x0 = Vector::Zero(2);
  c.episodes = 2;
  c.steps = 50;
  for (const Episode& e : generate_duffing(c)) {
    CHECK(e.states.isZero());
    CHECK(e.inputs.isZero());
  }
}

TEST_CASE("generate_duffing is deterministic per seed") {
  DuffingRunConfig c;
  c.episodes = 3;
  c.steps = 100;
  c.seed = 11;
  const auto a = generate_duffing(c);
  const auto b = generate_duffing(c);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].states == b[i].states);
    CHECK(a[i].inputs == b[i].inputs);
  }
  c.seed = 12;
  CHECK(generate_duffing(c)[0].states != a[0].states);
}

TEST_CASE("unforced energy envelope decreases") {
  DuffingRunConfig c;
  c.forcing.kind = ForcingKind::kZero;
  c.use_fixed_x0 = true;
  c.fixed_x0 = v2(1, 0);
  c.episodes = 1;
  c.steps = 1000;
  const Episode e = generate_duffing(c).front();
  // Window of one undamped period, 2 pi sqrt(m / k1) = 2 pi seconds.
  const int window = static_cast<int>(2.0 * 3.14159265358979 / c.params.dt) + 1;
  double prev = std::numeric_limits<double>::infinity();
  for (int start = 0; start + window <= e.states.cols(); start += window) {
    double peak = 0.0;
    for (int k = start; k < start + window; ++k) {
      peak = std::max(peak, duffing_energy(c.params, e.states.col(k)));
    }
    CHECK(peak < prev);
    prev = peak;
  }

  // Fine-step reference: Euler at dt/100 and the coarse run agree on decay.
  DuffingParams fine = c.params;
  fine.dt /= 100.0;
  Vector x = v2(1, 0);
  for (int k = 0; k < 100 * c.steps; ++k) x = duffing_step(fine, x, 0.0);
  const double e0 = duffing_energy(c.params, v2(1, 0));
  CHECK(duffing_energy(c.params, x) < e0);
  CHECK(duffing_energy(c.params, e.states.col(c.steps)) < e0);
}

TEST_CASE("generate_duffing reports divergence") {
  DuffingRunConfig c;
  c.params.k_cubic = -50.0;
  c.use_fixed_x0 = true;
  c.fixed_x0 = v2(10, 0);
  c.episodes = 1;
  c.steps = 5000;
  try {
    generate_duffing(c);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSimulationDiverged);
  }
}

TEST_CASE("add_noise statistics and exact inputs") {
  DuffingRunConfig c;
  c.episodes = 1;
  c.steps = 49999;
  const Episode clean = generate_duffing(c).front();
  NoiseSpec zero;
  zero.std_dev = {0.0};
  const Episode same = add_noise(clean, zero);
  CHECK(same.states == clean.states);

  NoiseSpec ns;
  ns.std_dev = {std::sqrt(2.0) / 10.0};
  ns.seed = 5;
  const Episode noisy = add_noise(clean, ns);
  CHECK(noisy.inputs == clean.inputs);
  CHECK(noisy.states.rows() == clean.states.rows());
  CHECK(noisy.states.cols() == clean.states.cols());
  const Matrix d = noisy.states - clean.states;
  const double mean = d.mean();
  const double var = (d.array() - mean).square().sum() / (d.size() - 1);
  CHECK(d.size() == 100000);
  CHECK(std::abs(var - 0.02) <= 0.02 * 0.02);
  CHECK(add_noise(clean, ns).states == noisy.states);
}

TEST_CASE("snr_db examples and monotonicity") {
  Episode clean;
  clean.id = "a";
  clean.dt = 1.0;
  clean.states.resize(1, 5);
  clean.states << 1, -1, 1, -1, 1;
  clean.inputs = Matrix::Zero(1, 4);
  Episode noisy = clean;
  CHECK(std::isinf(snr_db(clean, noisy)));

  // Noise with the same variance as the signal gives 0 dB.
  noisy.states = clean.states + clean.states;
  CHECK(snr_db(clean, noisy) == doctest::Approx(0.0).epsilon(1e-12));
  noisy.states = clean.states + 0.1 * clean.states;
  CHECK(snr_db(clean, noisy) == doctest::Approx(20.0));

  DuffingRunConfig c;
  c.episodes = 2;
  const auto eps = generate_duffing(c);
  double prev = std::numeric_limits<double>::infinity();
  for (double s : {0.01, 0.1, 1.0}) {
    NoiseSpec ns;
    ns.std_dev = {s};
    const double v = snr_db(eps, add_noise(eps, ns));
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("noise_std_for_snr hits the target") {
  DuffingRunConfig c;
  c.episodes = 4;
  const auto eps = generate_duffing(c);
  const double s = noise_std_for_snr(eps, 20.0);
  NoiseSpec ns;
  ns.std_dev = {s};
  ns.seed = 3;
  CHECK(snr_db(eps, add_noise(eps, ns)) == doctest::Approx(20.0).epsilon(0.01));
}

TEST_CASE("episode CSV layout and round trip") {
  DuffingRunConfig c;
  c.episodes = 1;
  c.steps = 10;
  const Episode e = generate_duffing(c).front();
  const std::string csv = episode_to_csv(e);
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 12);
  CHECK(csv.rfind("t,x1,x2,u1\n", 0) == 0);
  const Episode back = episode_from_csv(csv, e.id);
  CHECK(back.states == e.states);
  CHECK(back.inputs == e.inputs);
}

TEST_CASE("episode sets on disk") {
  SurrogateConfig sc;
  sc.steps = 20;
  const EpisodeSet set = generate_surrogate(sc);
  CHECK(set.with_role("train").size() == 13);
  CHECK(set.with_role("test").size() == 4);
  const auto dir = temp_dir("set");
  write_episode_set(set, dir);
  CHECK(std::filesystem::exists(dir / "meta.json"));
  CHECK(std::filesystem::exists(dir / "episode_000.csv"));
  const EpisodeSet back = read_episode_set(dir);
  REQUIRE(back.episodes.size() == set.episodes.size());
  CHECK(back.dt == set.dt);
  CHECK(back.roles == set.roles);
  for (size_t i = 0; i < set.episodes.size(); ++i) {
    CHECK(back.episodes[i].states == set.episodes[i].states);
    CHECK(back.episodes[i].inputs == set.episodes[i].inputs);
  }
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(read_episode_set(dir), Error);
}

TEST_CASE("episode validation") {
  Episode e;
  e.id = "x";
  e.dt = 0.1;
  e.states = Matrix::Zero(2, 3);
  e.inputs = Matrix::Zero(1, 3);
  CHECK_THROWS_AS(e.validate(), Error);
  e.inputs = Matrix::Zero(1, 2);
  CHECK_NOTHROW(e.validate());
  e.dt = 0.0;
  CHECK_THROWS_AS(e.validate(), Error);
}

TEST_CASE("surrogate is deterministic and bounded") {
  SurrogateConfig sc;
  sc.seed = 4;
  const auto a = generate_surrogate(sc);
  const auto b = generate_surrogate(sc);
  for (size_t i = 0; i < a.episodes.size(); ++i) {
    CHECK(a.episodes[i].states == b.episodes[i].states);
    CHECK(a.episodes[i].states.cwiseAbs().maxCoeff() < 10.0 * sc.scale);
  }
}

}  // TEST_SUITE
