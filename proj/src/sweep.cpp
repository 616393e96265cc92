// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include "koopid/sweep.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "koopid/error.hpp"
#include "koopid/parallel.hpp"

namespace koopid {

std::uint64_t cell_noise_seed(std::uint64_t seed, int snr_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(snr_index), 0x5EEDu};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace {

std::string status_of(const Error& e) {
  return std::string("error:") + error_code_name(e.code());
}

}  // namespace

std::vector<SweepRow> snr_sweep(const SweepConfig& cfg) {
  KOOPID_CHECK(!cfg.methods.empty() && !cfg.snr_db.empty() && !cfg.seeds.empty(),
               ErrorCode::kInvalidInput, "snr_sweep: empty grid");
  KOOPID_CHECK(!cfg.clean.empty(), ErrorCode::kInvalidInput,
               "snr_sweep: no episodes");

  const int nm = static_cast<int>(cfg.methods.size());
  const int ns = static_cast<int>(cfg.snr_db.size());
  const int nk = static_cast<int>(cfg.seeds.size());

  // Noise-free reference per method.
  std::vector<std::optional<KoopmanModel>> refs(nm);
  std::vector<std::string> ref_status(nm, "ok");
  parallel_for(nm, [&](int i) {
    try {
      refs[i] = identify(cfg.methods[i], cfg.clean, cfg.spec, cfg.identify).model;
    } catch (const Error& e) {
      ref_status[i] = status_of(e) + "-reference";
    }
  }, cfg.threads);

  std::vector<double> sigma(ns);
  for (int j = 0; j < ns; ++j) {
    sigma[j] = std::isinf(cfg.snr_db[j]) && cfg.snr_db[j] > 0
                   ? 0.0
                   : noise_std_for_snr(cfg.clean, cfg.snr_db[j]);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<SweepRow> rows(static_cast<size_t>(nm) * ns * nk);
  parallel_for(static_cast<int>(rows.size()), [&](int idx) {
    const int i = idx / (ns * nk);
    const int j = (idx / nk) % ns;
    const int k = idx % nk;
    SweepRow& row = rows[idx];
    row.method = cfg.methods[i];
    row.snr_db = cfg.snr_db[j];
    row.seed = cfg.seeds[k];
    row.err_full = row.err_A = row.err_B = row.spectral_radius = nan;
    if (!refs[i]) {
      row.status = ref_status[i];
      return;
    }
    try {
      std::vector<Episode> data = cfg.clean;
      if (sigma[j] > 0.0) {
        NoiseSpec noise;
        noise.std_dev = {sigma[j]};
        noise.seed = cell_noise_seed(cfg.seeds[k], j);
        data = add_noise(cfg.clean, noise);
      }
      const KoopmanModel m =
          identify(cfg.methods[i], data, cfg.spec, cfg.identify).model;
      row.spectral_radius = spectral_radius(m.A);
      const ModelError e = relative_model_error(m, *refs[i]);
      row.err_full = e.full;
      row.err_A = e.a_only;
      row.err_B = e.b_only;
      row.status = "ok";
    } catch (const Error& e) {
      row.status = status_of(e);
    }
  }, cfg.threads);
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "method,snr_db,seed,err_full,err_A,err_B,spectral_radius,status\n";
  for (const SweepRow& r : rows) {
    os << method_name(r.method) << ',' << format_double(r.snr_db) << ','
       << r.seed << ',' << format_double(r.err_full) << ','
       << format_double(r.err_A) << ',' << format_double(r.err_B) << ','
       << format_double(r.spectral_radius) << ',' << r.status << '\n';
  }
  return os.str();
}

}  // namespace koopid
