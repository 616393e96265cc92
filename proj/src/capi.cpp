// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include "koopid/koopid.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "koopid/dataset.hpp"
#include "koopid/error.hpp"
#include "koopid/io.hpp"
#include "koopid/model_io.hpp"
#include "koopid/pipeline.hpp"
#include "koopid/rollout.hpp"
#include "koopid/surrogate.hpp"
#include "koopid/sweep.hpp"

struct koopid_dataset {
  koopid::EpisodeSet set;
};

struct koopid_model {
  koopid::ModelFile file;
  double solve_seconds = -1.0;  // only known for models identified here
};

namespace {

using Json = nlohmann::ordered_json;

thread_local std::string g_last_error;

koopid_status to_status(koopid::ErrorCode c) {
  return static_cast<koopid_status>(static_cast<int>(c));
}

template <class Fn>
koopid_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return KOOPID_OK;
  } catch (const koopid::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return KOOPID_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return KOOPID_ERR_INTERNAL;
  }
}

void require(bool cond, const char* msg) {
  if (!cond) throw koopid::Error(koopid::ErrorCode::kInvalidInput, msg);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::optional<double> opt(double v) {
  return std::isnan(v) ? std::nullopt : std::optional<double>(v);
}

koopid::Method method_or_throw(const char* name) {
  require(name != nullptr, "method is required");
  const auto m = koopid::parse_method(name);
  if (!m) {
    throw koopid::Error(koopid::ErrorCode::kUsage,
                        std::string("unknown method '") + name + "'");
  }
  return *m;
}

std::vector<koopid::Episode> training_episodes(const koopid::EpisodeSet& set) {
  auto train = set.with_role("train");
  if (train.empty()) {
    throw koopid::Error(koopid::ErrorCode::kInvalidInput,
                        "dataset has no train episodes");
  }
  return train;
}

koopid::StabilityConfig stability_config(const koopid_identify_options& o) {
  koopid::StabilityConfig c;
  if (!std::isnan(o.rho_bar)) c.rho_bar = o.rho_bar;
  c.epsilon = opt(o.epsilon);
  c.strict_margin = opt(o.strict_margin);
  if (!std::isnan(o.feasibility_tol)) c.feasibility_tol = o.feasibility_tol;
  if (!std::isnan(o.gap_tol)) c.gap_tol = o.gap_tol;
  if (o.max_iterations > 0) c.max_iterations = o.max_iterations;
  c.verbose = o.verbose != 0;
  if (o.dump_path) c.dump_path = o.dump_path;
  c.validate();
  return c;
}

// Canonical rendering of every option that changes the identified model.
std::string config_hash(const koopid_identify_options& o) {
  std::ostringstream os;
  os << "method=" << o.method << ";degree=" << o.monomial_degree
     << ";rbf=" << o.rbf_count << ";alpha=" << koopid::format_double(o.alpha)
     << ";delta=" << koopid::format_double(o.delta)
     << ";raw=" << o.include_raw_states << ";lseed=" << o.lifting_seed
     << ";noise=" << koopid::format_double(o.noise_std)
     << ";snr=" << koopid::format_double(o.target_snr_db)
     << ";nseed=" << o.noise_seed
     << ";rho=" << koopid::format_double(o.rho_bar)
     << ";eps=" << koopid::format_double(o.epsilon)
     << ";mu=" << koopid::format_double(o.strict_margin)
     << ";ftol=" << koopid::format_double(o.feasibility_tol)
     << ";gtol=" << koopid::format_double(o.gap_tol)
     << ";iters=" << o.max_iterations;
  return koopid::fnv1a_hex(os.str());
}

}  // namespace

extern "C" {

const char* koopid_version(void) { return "0.1.0"; }

const char* koopid_last_error(void) { return g_last_error.c_str(); }

const char* koopid_status_name(koopid_status status) {
  if (status == KOOPID_OK) return "ok";
  if (status == KOOPID_ERR_INTERNAL) return "internal";
  return koopid::error_code_name(static_cast<koopid::ErrorCode>(status));
}

void koopid_string_free(char* s) { delete[] s; }

void koopid_duffing_options_init(koopid_duffing_options* o) {
  if (!o) return;
  const koopid::DuffingRunConfig d;
  o->mass = d.params.mass;
  o->damping = d.params.damping;
  o->k_linear = d.params.k_linear;
  o->k_cubic = d.params.k_cubic;
  o->dt = d.params.dt;
  o->forcing = KOOPID_FORCING_RANDOM;
  o->amplitude = d.forcing.amplitude;
  o->frequency = d.forcing.frequency;
  o->max_frequency = d.forcing.max_frequency;
  o->components = d.forcing.components;
  o->steps = d.steps;
  o->train_episodes = 20;
  o->test_episodes = 2;
  o->x0_box = d.x0_box;
  o->seed = d.seed;
}

koopid_status koopid_simulate_duffing(const koopid_duffing_options* o,
                                      koopid_dataset** out) {
  return guarded([&] {
    require(o && out, "null argument");
    require(o->train_episodes >= 0 && o->test_episodes >= 0,
            "episode counts must be non-negative");
    koopid::DuffingRunConfig c;
    c.params = {o->mass, o->damping, o->k_linear, o->k_cubic, o->dt};
    switch (o->forcing) {
      case KOOPID_FORCING_ZERO: c.forcing.kind = koopid::ForcingKind::kZero; break;
      case KOOPID_FORCING_SINUSOID:
        c.forcing.kind = koopid::ForcingKind::kSinusoid;
        break;
      case KOOPID_FORCING_RANDOM:
        c.forcing.kind = koopid::ForcingKind::kRandom;
        break;
      default: require(false, "unknown forcing kind");
    }
    c.forcing.amplitude = o->amplitude;
    c.forcing.frequency = o->frequency;
    c.forcing.max_frequency = o->max_frequency;
    c.forcing.components = o->components;
    c.steps = o->steps;
    c.episodes = o->train_episodes + o->test_episodes;
    c.x0_box = o->x0_box;
    c.seed = o->seed;
    auto ds = std::make_unique<koopid_dataset>();
    ds->set.dt = o->dt;
    ds->set.state_dim = 2;
    ds->set.input_dim = 1;
    ds->set.episodes = koopid::generate_duffing(c);
    for (int i = 0; i < c.episodes; ++i) {
      ds->set.roles.push_back(i < o->train_episodes ? "train" : "test");
    }
    ds->set.validate();
    *out = ds.release();
  });
}

void koopid_surrogate_options_init(koopid_surrogate_options* o) {
  if (!o) return;
  const koopid::SurrogateConfig d;
  o->decay = d.decay;
  o->rotation = d.rotation;
  o->gain = d.gain;
  o->cubic = d.cubic;
  o->scale = d.scale;
  o->dt = d.dt;
  o->steps = d.steps;
  o->hold = d.hold;
  o->train_episodes = d.train_episodes;
  o->test_episodes = d.test_episodes;
  o->seed = d.seed;
}

koopid_status koopid_simulate_surrogate(const koopid_surrogate_options* o,
                                        koopid_dataset** out) {
  return guarded([&] {
    require(o && out, "null argument");
    koopid::SurrogateConfig c;
    c.decay = o->decay;
    c.rotation = o->rotation;
    c.gain = o->gain;
    c.cubic = o->cubic;
    c.scale = o->scale;
    c.dt = o->dt;
    c.steps = o->steps;
    c.hold = o->hold;
    c.train_episodes = o->train_episodes;
    c.test_episodes = o->test_episodes;
    c.seed = o->seed;
    auto ds = std::make_unique<koopid_dataset>();
    ds->set = koopid::generate_surrogate(c);
    *out = ds.release();
  });
}

koopid_status koopid_dataset_read(const char* dir, koopid_dataset** out) {
  return guarded([&] {
    require(dir && out, "null argument");
    auto ds = std::make_unique<koopid_dataset>();
    ds->set = koopid::read_episode_set(dir);
    *out = ds.release();
  });
}

koopid_status koopid_dataset_write(const koopid_dataset* ds, const char* dir) {
  return guarded([&] {
    require(ds && dir, "null argument");
    koopid::write_episode_set(ds->set, dir);
  });
}

void koopid_dataset_free(koopid_dataset* ds) { delete ds; }

koopid_status koopid_dataset_summary(const koopid_dataset* ds, char** json) {
  return guarded([&] {
    require(ds && json, "null argument");
    Json j;
    j["episodes"] = ds->set.episodes.size();
    j["train"] = ds->set.with_role("train").size();
    j["test"] = ds->set.with_role("test").size();
    j["steps"] = ds->set.episodes.empty() ? 0 : ds->set.episodes.front().steps();
    j["dt"] = ds->set.dt;
    j["m"] = ds->set.state_dim;
    j["n"] = ds->set.input_dim;
    *json = dup_string(j.dump());
  });
}

void koopid_identify_options_init(koopid_identify_options* o) {
  if (!o) return;
  const double nan = std::nan("");
  const koopid::LiftingOptions l;
  const koopid::StabilityConfig s;
  o->method = "edmd";
  o->monomial_degree = l.monomial_degree;
  o->rbf_count = l.rbf_count;
  o->alpha = l.alpha;
  o->delta = l.delta;
  o->include_raw_states = l.include_raw_states ? 1 : 0;
  o->lifting_seed = l.seed;
  o->noise_std = nan;
  o->target_snr_db = nan;
  o->noise_seed = 0;
  o->rho_bar = s.rho_bar;
  o->epsilon = nan;
  o->strict_margin = nan;
  o->feasibility_tol = s.feasibility_tol;
  o->gap_tol = s.gap_tol;
  o->max_iterations = s.max_iterations;
  o->verbose = 0;
  o->dump_path = nullptr;
}

koopid_status koopid_identify(const koopid_dataset* ds,
                              const koopid_identify_options* o,
                              koopid_model** out) {
  return guarded([&] {
    require(ds && o && out, "null argument");
    const koopid::Method method = method_or_throw(o->method);
    if (!std::isnan(o->noise_std) && !std::isnan(o->target_snr_db)) {
      throw koopid::Error(koopid::ErrorCode::kUsage,
                          "give at most one of noise std and target SNR");
    }
    const auto clean = training_episodes(ds->set);

    koopid::LiftingOptions lo;
    lo.monomial_degree = o->monomial_degree;
    lo.rbf_count = o->rbf_count;
    lo.alpha = o->alpha;
    lo.delta = o->delta;
    lo.include_raw_states = o->include_raw_states != 0;
    lo.seed = o->lifting_seed;
    // Centers come from the clean episodes so that every noise level shares
    // one lifting.
    const koopid::LiftingSpec spec = koopid::build_lifting(clean, lo);

    auto data = clean;
    double sigma = 0.0;
    if (!std::isnan(o->noise_std)) sigma = o->noise_std;
    if (!std::isnan(o->target_snr_db)) {
      sigma = koopid::noise_std_for_snr(clean, o->target_snr_db);
    }
    if (sigma > 0.0) {
      koopid::NoiseSpec ns;
      ns.std_dev = {sigma};
      ns.seed = o->noise_seed;
      data = koopid::add_noise(clean, ns);
    }

    koopid::IdentifyOptions io;
    io.stability = stability_config(*o);
    koopid::IdentifyResult r = koopid::identify(method, data, spec, io);

    auto m = std::make_unique<koopid_model>();
    m->file.model = std::move(r.model);
    if (r.stability) m->solve_seconds = r.stability->solve_seconds;
    m->file.stability = std::move(r.stability);
    m->file.combine = std::move(r.combine);
    m->file.dataset_hash = koopid::dataset_hash(clean);
    m->file.config_hash = config_hash(*o);
    *out = m.release();
  });
}

koopid_status koopid_model_save(const koopid_model* model, const char* path) {
  return guarded([&] {
    require(model && path, "null argument");
    koopid::save_model(model->file, path);
  });
}

koopid_status koopid_model_load(const char* path, koopid_model** out) {
  return guarded([&] {
    require(path && out, "null argument");
    auto m = std::make_unique<koopid_model>();
    m->file = koopid::load_model(path);
    *out = m.release();
  });
}

void koopid_model_free(koopid_model* model) { delete model; }

koopid_status koopid_model_summary(const koopid_model* model, char** json) {
  return guarded([&] {
    require(model && json, "null argument");
    const koopid::KoopmanModel& km = model->file.model;
    Json j;
    j["method"] = koopid::method_name(km.method);
    j["p_theta"] = km.spec.lifted_state_dim();
    j["p_upsilon"] = km.spec.lifted_input_dim();
    j["spectral_radius"] = koopid::spectral_radius(km.A);
    if (const auto& s = model->file.stability) {
      Json st;
      st["status"] = s->solver_status;
      st["iterations"] = s->iterations;
      st["gamma"] = s->gamma;
      if (s->combined) st["nu"] = s->nu;
      Json margins = Json::object();
      for (const auto& c : s->margins) margins[c.name] = c.value;
      st["margins"] = std::move(margins);
      st["forward_lmi_margin"] = s->forward_lmi_margin;
      if (s->combined) {
        st["backward_quadratic_margin"] = s->backward_quadratic_margin;
        st["backward_linearized_margin"] = s->backward_linearized_margin;
      }
      if (model->solve_seconds >= 0.0) st["solve_seconds"] = model->solve_seconds;
      j["stability"] = std::move(st);
    }
    if (const auto& c = model->file.combine) {
      j["combine"] = {{"sqrt_residual", c->sqrt_residual},
                      {"abb_condition", c->abb_condition},
                      {"rank_deficient", c->rank_deficient}};
    }
    *json = dup_string(j.dump());
  });
}

koopid_status koopid_model_spectral_radius(const koopid_model* model,
                                           double* out) {
  return guarded([&] {
    require(model && out, "null argument");
    *out = koopid::spectral_radius(model->file.model.A);
  });
}

koopid_status koopid_predict(const koopid_model* model,
                             const koopid_dataset* ds, const char* episode_id,
                             char** csv) {
  return guarded([&] {
    require(model && ds && episode_id && csv, "null argument");
    const koopid::Episode* ref = nullptr;
    for (const auto& e : ds->set.episodes) {
      if (e.id == episode_id) ref = &e;
    }
    if (!ref) {
      throw koopid::Error(koopid::ErrorCode::kIo,
                          std::string("no episode '") + episode_id + "'");
    }
    const koopid::PredictionResult p = koopid::rollout(model->file.model, *ref);
    const std::string status =
        p.diverged ? "diverged@" + std::to_string(p.diverged_at) : "ok";
    const int m = ref->state_dim();
    std::ostringstream os;
    os << "t";
    for (int i = 0; i < m; ++i) os << ",pred_x" << i + 1;
    for (int i = 0; i < m; ++i) os << ",ref_x" << i + 1;
    os << ",error,status\n";
    for (Eigen::Index k = 0; k < p.states.cols(); ++k) {
      os << koopid::format_double(k * ref->dt);
      for (int i = 0; i < m; ++i) os << ',' << koopid::format_double(p.states(i, k));
      for (int i = 0; i < m; ++i) os << ',' << koopid::format_double(ref->states(i, k));
      os << ',' << koopid::format_double(p.step_error(k)) << ',' << status << '\n';
    }
    *csv = dup_string(os.str());
  });
}

koopid_status koopid_evaluate(const koopid_model* model,
                              const koopid_dataset* ds, const char* role,
                              char** metrics_csv, char** eigen_csv) {
  return guarded([&] {
    require(model && ds && role && metrics_csv && eigen_csv, "null argument");
    const std::string r = role;
    require(r == "train" || r == "test" || r == "all",
            "role must be train, test or all");
    const auto episodes = r == "all" ? ds->set.episodes : ds->set.with_role(r);
    if (episodes.empty()) {
      throw koopid::Error(koopid::ErrorCode::kIo,
                          "no episodes with role '" + r + "'");
    }
    std::ostringstream os;
    os << "episode,rms,mean,steps,status\n";
    for (const auto& e : episodes) {
      const auto s = koopid::prediction_errors(
          koopid::rollout(model->file.model, e), e);
      os << e.id << ',' << koopid::format_double(s.rms) << ','
         << koopid::format_double(s.mean) << ',' << s.steps << ','
         << (s.diverged ? "diverged@" + std::to_string(s.diverged_at) : "ok")
         << '\n';
    }
    const koopid::ComplexVector ev = koopid::eigenvalues(model->file.model.A);
    std::ostringstream es;
    es << "index,real,imag,modulus\n";
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      es << i << ',' << koopid::format_double(ev(i).real()) << ','
         << koopid::format_double(ev(i).imag()) << ','
         << koopid::format_double(std::abs(ev(i))) << '\n';
    }
    *metrics_csv = dup_string(os.str());
    *eigen_csv = dup_string(es.str());
  });
}

void koopid_sweep_options_init(koopid_sweep_options* o) {
  if (!o) return;
  static const double kGrid[] = {5, 10, 15, 20, 25, 30, 40};
  const koopid::LiftingOptions l;
  o->methods = "edmd,edmd-as,fbedmd,fbedmd-as";
  o->snr_db = kGrid;
  o->snr_count = sizeof(kGrid) / sizeof(kGrid[0]);
  o->seed_base = 0;
  o->seed_count = 10;
  o->monomial_degree = l.monomial_degree;
  o->rbf_count = l.rbf_count;
  o->alpha = l.alpha;
  o->delta = l.delta;
  o->lifting_seed = l.seed;
  o->rho_bar = koopid::StabilityConfig{}.rho_bar;
  o->threads = 0;
}

koopid_status koopid_sweep(const koopid_dataset* ds,
                           const koopid_sweep_options* o, char** csv) {
  return guarded([&] {
    require(ds && o && csv, "null argument");
    require(o->methods && (o->snr_count == 0 || o->snr_db),
            "methods and SNR grid are required");
    koopid::SweepConfig cfg;
    cfg.clean = training_episodes(ds->set);
    std::stringstream ms(o->methods);
    for (std::string tok; std::getline(ms, tok, ',');) {
      cfg.methods.push_back(method_or_throw(tok.c_str()));
    }
    cfg.snr_db.assign(o->snr_db, o->snr_db + o->snr_count);
    require(o->seed_count > 0, "seed count must be positive");
    for (int k = 0; k < o->seed_count; ++k) cfg.seeds.push_back(o->seed_base + k);
    koopid::LiftingOptions lo;
    lo.monomial_degree = o->monomial_degree;
    lo.rbf_count = o->rbf_count;
    lo.alpha = o->alpha;
    lo.delta = o->delta;
    lo.seed = o->lifting_seed;
    cfg.spec = koopid::build_lifting(cfg.clean, lo);
    cfg.identify.stability.rho_bar = o->rho_bar;
    cfg.identify.stability.validate();
    cfg.threads = o->threads;
    *csv = dup_string(koopid::sweep_to_csv(koopid::snr_sweep(cfg)));
  });
}

}  // extern "C"
