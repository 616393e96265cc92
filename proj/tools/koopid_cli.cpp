// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

// koopid simulate|identify|predict|evaluate. Talks to the library only
// through the C interface.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "koopid/koopid.h"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Failure {
  koopid_status status;
  std::string message;
};

void check(koopid_status s) {
  if (s != KOOPID_OK) throw Failure{s, koopid_last_error()};
}

struct DatasetDeleter {
  void operator()(koopid_dataset* d) const { koopid_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(koopid_model* m) const { koopid_model_free(m); }
};
using DatasetPtr = std::unique_ptr<koopid_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<koopid_model, ModelDeleter>;

std::string take(char* s) {
  std::string out = s ? s : "";
  koopid_string_free(s);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    f << text;
    if (!f) throw Failure{KOOPID_ERR_IO, "cannot write " + path.string()};
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Failure{KOOPID_ERR_IO, "cannot write " + path.string()};
}

DatasetPtr read_dataset(const std::string& dir) {
  koopid_dataset* d = nullptr;
  check(koopid_dataset_read(dir.c_str(), &d));
  return DatasetPtr(d);
}

ModelPtr read_model(const std::string& path) {
  koopid_model* m = nullptr;
  check(koopid_model_load(path.c_str(), &m));
  return ModelPtr(m);
}

void print_error(const Failure& f) {
  nlohmann::ordered_json j;
  j["error"] = {{"code", koopid_status_name(f.status)},
                {"message", f.message}};
  std::cerr << j.dump() << "\n";
}

struct LiftFlags {
  int degree = 2;
  int rbf_count = 10;
  double alpha = 0.1;
  double delta = 0.001;
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--monomial-degree", degree, "Polynomial lifting degree")
        ->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--rbf-count", rbf_count, "Number of thin-plate RBFs")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--alpha", alpha, "RBF shape parameter")
        ->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--delta", delta, "RBF offset")
        ->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--seed-lifting", seed, "RBF center sampling seed")
        ->capture_default_str();
  }
};

const std::vector<std::string> kMethods = {"edmd", "edmd-as", "fbedmd",
                                           "fbedmd-as"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Koopman identification with forward-backward EDMD and "
               "asymptotic stability constraints"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(koopid_version()));

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate an episode set");
  std::string system = "duffing";
  std::string sim_out;
  int episodes = -1;
  int test_episodes = -1;
  int steps = -1;
  std::uint64_t seed_dataset = 0;
  std::string forcing = "random";
  std::optional<double> amplitude, x0_box;
  sim->add_option("--system", system, "duffing or surrogate")
      ->check(CLI::IsMember({"duffing", "surrogate"}))->capture_default_str();
  sim->add_option("--episodes", episodes,
                  "Total episode count (default 22 duffing, 17 surrogate)")
      ->check(CLI::PositiveNumber);
  sim->add_option("--test-episodes", test_episodes,
                  "Episodes marked as test (default 2 duffing, 4 surrogate)")
      ->check(CLI::NonNegativeNumber);
  sim->add_option("--steps", steps, "Steps per episode")
      ->check(CLI::Range(2, 100000000));
  sim->add_option("--seed-dataset", seed_dataset, "Generation seed")
      ->capture_default_str();
  sim->add_option("--forcing", forcing, "zero, sinusoid or random (duffing)")
      ->check(CLI::IsMember({"zero", "sinusoid", "random"}))
      ->capture_default_str();
  sim->add_option("--amplitude", amplitude, "Forcing amplitude in N (duffing)");
  sim->add_option("--x0-box", x0_box,
                  "Initial states drawn from [-b, b]^2 (duffing)");
  sim->add_option("--out", sim_out, "Output directory")->required();

  // identify
  auto* idf = app.add_subcommand("identify", "Fit a Koopman model");
  std::string id_data, id_out, method = "fbedmd-as", dump_path;
  LiftFlags id_lift;
  std::optional<double> noise_std, target_snr, rho_bar, epsilon, strict_margin;
  std::uint64_t seed_noise = 0;
  int max_iterations = 0;
  bool verbose = false;
  idf->add_option("--data", id_data, "Episode set directory")->required();
  idf->add_option("--method", method, "edmd, edmd-as, fbedmd or fbedmd-as")
      ->check(CLI::IsMember(kMethods))->capture_default_str();
  id_lift.add(idf);
  auto* o_std = idf->add_option("--noise-std", noise_std,
                                "Gaussian noise std added to training states");
  auto* o_snr = idf->add_option("--target-snr-db", target_snr,
                                "Add noise to reach this SNR");
  o_std->excludes(o_snr);
  idf->add_option("--seed-noise", seed_noise, "Noise seed")->capture_default_str();
  idf->add_option("--rho-bar", rho_bar, "Spectral radius bound (default 0.999)");
  idf->add_option("--epsilon", epsilon, "Lower bound on P (default automatic)");
  idf->add_option("--strict-margin", strict_margin,
                  "Margin for strict inequalities (default automatic)");
  idf->add_option("--max-iterations", max_iterations, "Solver iteration cap")
      ->check(CLI::PositiveNumber);
  idf->add_option("--dump-sdp", dump_path, "Write the conic program here");
  idf->add_flag("--verbose", verbose, "Solver progress on stderr");
  idf->add_option("--out", id_out, "Model JSON path")->required();

  // predict
  auto* pred = app.add_subcommand("predict", "Multi-step prediction of one episode");
  std::string pr_model, pr_data, pr_episode, pr_out;
  pred->add_option("--model", pr_model, "Model JSON")->required();
  pred->add_option("--data", pr_data, "Episode set directory")->required();
  pred->add_option("--episode", pr_episode, "Episode id")->required();
  pred->add_option("--out", pr_out, "Output CSV")->required();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Prediction metrics or SNR sweep");
  std::string ev_model, ev_data, ev_out, role = "test";
  bool sweep = false;
  std::vector<double> snr_grid = {5, 10, 15, 20, 25, 30, 40};
  std::vector<std::string> methods = kMethods;
  int seeds = 10;
  std::uint64_t sweep_seed = 0;
  double sweep_rho = 0.999;
  int threads = 0;
  LiftFlags ev_lift;
  ev->add_option("--model", ev_model, "Model JSON (metrics mode)");
  ev->add_option("--data", ev_data, "Episode set directory")->required();
  ev->add_option("--role", role, "train, test or all")
      ->check(CLI::IsMember({"train", "test", "all"}))->capture_default_str();
  ev->add_flag("--sweep", sweep, "Run an SNR sweep instead of metrics");
  ev->add_option("--snr-grid", snr_grid, "SNR levels in dB")
      ->delimiter(',')->capture_default_str();
  ev->add_option("--methods", methods, "Methods in the sweep")
      ->delimiter(',')->check(CLI::IsMember(kMethods))->capture_default_str();
  ev->add_option("--seeds", seeds, "Noise seeds per SNR level")
      ->check(CLI::PositiveNumber)->capture_default_str();
  ev->add_option("--seed-noise", sweep_seed, "First noise seed")
      ->capture_default_str();
  ev->add_option("--rho-bar", sweep_rho, "Spectral radius bound")
      ->capture_default_str();
  ev->add_option("--threads", threads, "Worker threads (0: all cores)")
      ->check(CLI::NonNegativeNumber);
  ev_lift.add(ev);
  ev->add_option("--out", ev_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sim) {
      koopid_dataset* raw = nullptr;
      if (system == "duffing") {
        koopid_duffing_options o;
        koopid_duffing_options_init(&o);
        const int total = episodes > 0 ? episodes : 22;
        int test = test_episodes >= 0 ? test_episodes : 2;
        if (test > total - 1) test = total - 1;
        o.train_episodes = total - test;
        o.test_episodes = test;
        if (steps > 0) o.steps = steps;
        o.seed = seed_dataset;
        o.forcing = forcing == "zero"       ? KOOPID_FORCING_ZERO
                    : forcing == "sinusoid" ? KOOPID_FORCING_SINUSOID
                                            : KOOPID_FORCING_RANDOM;
        if (amplitude) o.amplitude = *amplitude;
        if (x0_box) o.x0_box = *x0_box;
        check(koopid_simulate_duffing(&o, &raw));
      } else {
        koopid_surrogate_options o;
        koopid_surrogate_options_init(&o);
        const int total = episodes > 0 ? episodes : 17;
        int test = test_episodes >= 0 ? test_episodes : 4;
        if (test > total - 1) test = total - 1;
        o.train_episodes = total - test;
        o.test_episodes = test;
        if (steps > 0) o.steps = steps;
        o.seed = seed_dataset;
        check(koopid_simulate_surrogate(&o, &raw));
      }
      DatasetPtr ds(raw);
      check(koopid_dataset_write(ds.get(), sim_out.c_str()));
      char* summary = nullptr;
      check(koopid_dataset_summary(ds.get(), &summary));
      std::cout << take(summary) << "\n";
    } else if (*idf) {
      DatasetPtr ds = read_dataset(id_data);
      koopid_identify_options o;
      koopid_identify_options_init(&o);
      o.method = method.c_str();
      o.monomial_degree = id_lift.degree;
      o.rbf_count = id_lift.rbf_count;
      o.alpha = id_lift.alpha;
      o.delta = id_lift.delta;
      o.lifting_seed = id_lift.seed;
      if (noise_std) o.noise_std = *noise_std;
      if (target_snr) o.target_snr_db = *target_snr;
      o.noise_seed = seed_noise;
      if (rho_bar) o.rho_bar = *rho_bar;
      if (epsilon) o.epsilon = *epsilon;
      if (strict_margin) o.strict_margin = *strict_margin;
      if (max_iterations > 0) o.max_iterations = max_iterations;
      o.verbose = verbose ? 1 : 0;
      if (!dump_path.empty()) o.dump_path = dump_path.c_str();
      koopid_model* raw = nullptr;
      check(koopid_identify(ds.get(), &o, &raw));
      ModelPtr model(raw);
      check(koopid_model_save(model.get(), id_out.c_str()));
      char* summary = nullptr;
      check(koopid_model_summary(model.get(), &summary));
      std::cout << take(summary) << "\n";
    } else if (*pred) {
      ModelPtr model = read_model(pr_model);
      DatasetPtr ds = read_dataset(pr_data);
      char* csv = nullptr;
      check(koopid_predict(model.get(), ds.get(), pr_episode.c_str(), &csv));
      write_text(pr_out, take(csv));
    } else if (*ev) {
      DatasetPtr ds = read_dataset(ev_data);
      if (sweep) {
        std::string joined;
        for (const auto& m : methods) joined += (joined.empty() ? "" : ",") + m;
        koopid_sweep_options o;
        koopid_sweep_options_init(&o);
        o.methods = joined.c_str();
        o.snr_db = snr_grid.data();
        o.snr_count = snr_grid.size();
        o.seed_base = sweep_seed;
        o.seed_count = seeds;
        o.monomial_degree = ev_lift.degree;
        o.rbf_count = ev_lift.rbf_count;
        o.alpha = ev_lift.alpha;
        o.delta = ev_lift.delta;
        o.lifting_seed = ev_lift.seed;
        o.rho_bar = sweep_rho;
        o.threads = threads;
        char* csv = nullptr;
        check(koopid_sweep(ds.get(), &o, &csv));
        write_text(fs::path(ev_out) / "sweep.csv", take(csv));
      } else {
        if (ev_model.empty()) {
          std::cerr << "evaluate: --model is required unless --sweep is given\n";
          return kExitUsage;
        }
        ModelPtr model = read_model(ev_model);
        char* metrics = nullptr;
        char* eig = nullptr;
        check(koopid_evaluate(model.get(), ds.get(), role.c_str(), &metrics, &eig));
        write_text(fs::path(ev_out) / "metrics.csv", take(metrics));
        write_text(fs::path(ev_out) / "eigenvalues.csv", take(eig));
      }
    }
  } catch (const Failure& f) {
    print_error(f);
    return f.status == KOOPID_ERR_USAGE ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    print_error({KOOPID_ERR_IO, e.what()});
    return kExitRuntime;
  }
  return kExitOk;
}
