// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

// Exercises the shared library through its C interface only.

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

#include "koopid/koopid.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  koopid_string_free(s);
  return out;
}

std::filesystem::path scratch(const char* name) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(p);
  return p;
}

koopid_dataset* small_duffing(int steps = 200, int train = 4) {
  koopid_duffing_options o;
  koopid_duffing_options_init(&o);
  o.steps = steps;
  o.train_episodes = train;
  o.test_episodes = 1;
  koopid_dataset* ds = nullptr;
  REQUIRE(koopid_simulate_duffing(&o, &ds) == KOOPID_OK);
  return ds;
}

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("version and status names") {
  CHECK(std::strlen(koopid_version()) > 0);
  CHECK(std::string(koopid_status_name(KOOPID_OK)) == "ok");
  CHECK(std::string(koopid_status_name(KOOPID_ERR_DIMENSION)) == "dimension");
  CHECK(std::string(koopid_status_name(KOOPID_ERR_USAGE)) == "usage");
}

TEST_CASE("null arguments are reported, not dereferenced") {
  koopid_dataset* ds = nullptr;
  CHECK(koopid_simulate_duffing(nullptr, &ds) == KOOPID_ERR_INVALID_INPUT);
  CHECK(std::strlen(koopid_last_error()) > 0);
  koopid_dataset_free(nullptr);
  koopid_model_free(nullptr);
  koopid_string_free(nullptr);
}

TEST_CASE("dataset summary and disk round trip") {
  koopid_dataset* ds = small_duffing();
  char* js = nullptr;
  REQUIRE(koopid_dataset_summary(ds, &js) == KOOPID_OK);
  const std::string s = take(js);
  CHECK(s.find("\"train\":4") != std::string::npos);
  CHECK(s.find("\"steps\":200") != std::string::npos);
  const auto dir = scratch("koopid_capi_ds");
  REQUIRE(koopid_dataset_write(ds, dir.c_str()) == KOOPID_OK);
  koopid_dataset* back = nullptr;
  REQUIRE(koopid_dataset_read(dir.c_str(), &back) == KOOPID_OK);
  REQUIRE(koopid_dataset_summary(back, &js) == KOOPID_OK);
  CHECK(take(js) == s);
  koopid_dataset_free(back);
  koopid_dataset_free(ds);
  std::filesystem::remove_all(dir);
  CHECK(koopid_dataset_read(dir.c_str(), &back) == KOOPID_ERR_IO);
}

TEST_CASE("identify, save, load, predict, evaluate") {
  koopid_dataset* ds = small_duffing(1000, 20);
  koopid_identify_options io;
  koopid_identify_options_init(&io);
  io.method = "fbedmd-as";
  io.noise_std = std::sqrt(2.0) / 10.0;
  io.noise_seed = 1;
  koopid_model* m = nullptr;
  REQUIRE(koopid_identify(ds, &io, &m) == KOOPID_OK);
  double rho = 0;
  REQUIRE(koopid_model_spectral_radius(m, &rho) == KOOPID_OK);
  CHECK(rho <= 0.999 + 1e-6);

  char* js = nullptr;
  REQUIRE(koopid_model_summary(m, &js) == KOOPID_OK);
  CHECK(take(js).find("\"method\":\"fbedmd-as\"") != std::string::npos);

  const auto path = scratch("koopid_capi_model.json");
  REQUIRE(koopid_model_save(m, path.c_str()) == KOOPID_OK);
  koopid_model* m2 = nullptr;
  REQUIRE(koopid_model_load(path.c_str(), &m2) == KOOPID_OK);

  char *c1 = nullptr, *c2 = nullptr;
  REQUIRE(koopid_predict(m, ds, "020", &c1) == KOOPID_OK);
  REQUIRE(koopid_predict(m2, ds, "020", &c2) == KOOPID_OK);
  const std::string p1 = take(c1);
  CHECK(p1 == take(c2));
  CHECK(p1.rfind("t,pred_x1,pred_x2,ref_x1,ref_x2,error,status\n", 0) == 0);
  CHECK(koopid_predict(m, ds, "nope", &c1) != KOOPID_OK);

  char *met = nullptr, *eig = nullptr;
  REQUIRE(koopid_evaluate(m, ds, "test", &met, &eig) == KOOPID_OK);
  const std::string metrics = take(met), eigs = take(eig);
  CHECK(metrics.rfind("episode,rms,mean,steps,status\n", 0) == 0);
  int rows = -1;
  for (char ch : eigs) rows += ch == '\n';
  CHECK(rows == 15);
  CHECK(koopid_evaluate(m, ds, "bogus", &met, &eig) == KOOPID_ERR_INVALID_INPUT);

  koopid_model_free(m2);
  koopid_model_free(m);
  koopid_dataset_free(ds);
  std::filesystem::remove(path);
}

TEST_CASE("exact lifting evaluates to zero error") {
  // Cubic monomials contain every term of the Euler update.
  koopid_dataset* ds = small_duffing(200);
  koopid_identify_options io;
  koopid_identify_options_init(&io);
  io.method = "edmd";
  io.monomial_degree = 3;
  io.rbf_count = 0;
  koopid_model* m = nullptr;
  REQUIRE(koopid_identify(ds, &io, &m) == KOOPID_OK);
  char *met = nullptr, *eig = nullptr;
  REQUIRE(koopid_evaluate(m, ds, "train", &met, &eig) == KOOPID_OK);
  const std::string metrics = take(met);
  koopid_string_free(eig);
  size_t pos = metrics.find('\n') + 1;
  int rows = 0;
  while (pos < metrics.size()) {
    const size_t c1 = metrics.find(',', pos);
    const double rms = std::strtod(metrics.c_str() + c1 + 1, nullptr);
    CHECK(rms < 1e-8);
    ++rows;
    pos = metrics.find('\n', pos) + 1;
  }
  CHECK(rows == 4);
  koopid_model_free(m);
  koopid_dataset_free(ds);
}

TEST_CASE("identify option errors") {
  koopid_dataset* ds = small_duffing(50);
  koopid_identify_options io;
  koopid_identify_options_init(&io);
  koopid_model* m = nullptr;
  io.method = "dmd";
  CHECK(koopid_identify(ds, &io, &m) == KOOPID_ERR_USAGE);
  io.method = "edmd";
  io.noise_std = 0.1;
  io.target_snr_db = 20;
  CHECK(koopid_identify(ds, &io, &m) == KOOPID_ERR_USAGE);
  CHECK(m == nullptr);
  koopid_dataset_free(ds);
}

TEST_CASE("surrogate sweep through the C interface") {
  koopid_surrogate_options so;
  koopid_surrogate_options_init(&so);
  so.steps = 300;
  koopid_dataset* ds = nullptr;
  REQUIRE(koopid_simulate_surrogate(&so, &ds) == KOOPID_OK);
  koopid_sweep_options sw;
  koopid_sweep_options_init(&sw);
  const double grid[] = {10, 40};
  sw.methods = "edmd,fbedmd";
  sw.snr_db = grid;
  sw.snr_count = 2;
  sw.seed_count = 2;
  sw.rbf_count = 0;
  char* csv = nullptr;
  REQUIRE(koopid_sweep(ds, &sw, &csv) == KOOPID_OK);
  const std::string s = take(csv);
  int lines = 0;
  for (char ch : s) lines += ch == '\n';
  CHECK(lines == 1 + 2 * 2 * 2);
  sw.methods = "edmd,nonsense";
  CHECK(koopid_sweep(ds, &sw, &csv) == KOOPID_ERR_USAGE);
  koopid_dataset_free(ds);
}

}  // TEST_SUITE
