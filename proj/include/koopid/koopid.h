/* Copyright 2026 The koopid Authors
 * SPDX-License-Identifier: Apache-2.0
 */

/* C interface to koopid. All objects are opaque handles owned by the caller
 * and released with the matching *_free function. Every function returns a
 * koopid_status; on failure koopid_last_error() describes the problem for
 * the calling thread. Strings returned through char** are allocated by the
 * library and released with koopid_string_free. */

#ifndef KOOPID_KOOPID_H_
#define KOOPID_KOOPID_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define KOOPID_API __declspec(dllexport)
#else
#define KOOPID_API __attribute__((visibility("default")))
#endif

typedef enum koopid_status {
  KOOPID_OK = 0,
  KOOPID_ERR_INVALID_INPUT = 1,
  KOOPID_ERR_DIMENSION,
  KOOPID_ERR_NUMERIC,
  KOOPID_ERR_NO_PRINCIPAL_ROOT,
  KOOPID_ERR_COMPLEX_ROOT,
  KOOPID_ERR_SIMULATION_DIVERGED,
  KOOPID_ERR_INFEASIBLE,
  KOOPID_ERR_SOLVER_FAILURE,
  KOOPID_ERR_CONDITIONING,
  KOOPID_ERR_UNSUPPORTED_RECOVERY,
  KOOPID_ERR_UNDEFINED_REFERENCE,
  KOOPID_ERR_IO,
  KOOPID_ERR_USAGE,
  KOOPID_ERR_INTERNAL = 100
} koopid_status;

typedef struct koopid_dataset koopid_dataset;
typedef struct koopid_model koopid_model;

KOOPID_API const char* koopid_version(void);

/* Message of the last failure on this thread; "" if none. */
KOOPID_API const char* koopid_last_error(void);

/* Stable short name of a status, e.g. "dimension". */
KOOPID_API const char* koopid_status_name(koopid_status status);

KOOPID_API void koopid_string_free(char* s);

/* ---- datasets ---------------------------------------------------------- */

typedef enum koopid_forcing {
  KOOPID_FORCING_ZERO = 0,
  KOOPID_FORCING_SINUSOID = 1,
  KOOPID_FORCING_RANDOM = 2
} koopid_forcing;

typedef struct koopid_duffing_options {
  double mass, damping, k_linear, k_cubic, dt;
  koopid_forcing forcing;
  double amplitude;
  double frequency;      /* sinusoid */
  double max_frequency;  /* random multisine */
  int components;        /* random multisine */
  int steps;
  int train_episodes;
  int test_episodes;
  double x0_box;
  uint64_t seed;
} koopid_duffing_options;

KOOPID_API void koopid_duffing_options_init(koopid_duffing_options* opts);
KOOPID_API koopid_status koopid_simulate_duffing(
    const koopid_duffing_options* opts, koopid_dataset** out);

typedef struct koopid_surrogate_options {
  double decay, rotation, gain, cubic, scale, dt;
  int steps;
  int hold;
  int train_episodes;
  int test_episodes;
  uint64_t seed;
} koopid_surrogate_options;

KOOPID_API void koopid_surrogate_options_init(koopid_surrogate_options* opts);
KOOPID_API koopid_status koopid_simulate_surrogate(
    const koopid_surrogate_options* opts, koopid_dataset** out);

KOOPID_API koopid_status koopid_dataset_read(const char* dir,
                                             koopid_dataset** out);
KOOPID_API koopid_status koopid_dataset_write(const koopid_dataset* ds,
                                              const char* dir);
KOOPID_API void koopid_dataset_free(koopid_dataset* ds);

/* One-line JSON summary: episode counts per role, steps, dt, dims. */
KOOPID_API koopid_status koopid_dataset_summary(const koopid_dataset* ds,
                                                char** json);

/* ---- identification ---------------------------------------------------- */

/* NaN in a double field means "unset". */
typedef struct koopid_identify_options {
  const char* method; /* edmd | edmd-as | fbedmd | fbedmd-as */
  int monomial_degree;
  int rbf_count;
  double alpha;
  double delta;
  int include_raw_states;
  uint64_t lifting_seed;
  double noise_std;     /* added to training states before identification */
  double target_snr_db; /* alternative to noise_std */
  uint64_t noise_seed;
  double rho_bar;
  double epsilon;
  double strict_margin;
  double feasibility_tol;
  double gap_tol;
  int max_iterations;
  int verbose;          /* solver progress on stderr */
  const char* dump_path; /* conic program dump, NULL for none */
} koopid_identify_options;

KOOPID_API void koopid_identify_options_init(koopid_identify_options* opts);

/* Identifies a model from the dataset's "train" episodes. */
KOOPID_API koopid_status koopid_identify(const koopid_dataset* ds,
                                         const koopid_identify_options* opts,
                                         koopid_model** out);

KOOPID_API koopid_status koopid_model_save(const koopid_model* model,
                                           const char* path);
KOOPID_API koopid_status koopid_model_load(const char* path,
                                           koopid_model** out);
KOOPID_API void koopid_model_free(koopid_model* model);

/* JSON with method, dims, spectral radius, margins, solver status and solve
 * time when the model was identified in this process. */
KOOPID_API koopid_status koopid_model_summary(const koopid_model* model,
                                              char** json);

KOOPID_API koopid_status koopid_model_spectral_radius(const koopid_model* model,
                                                      double* out);

/* ---- prediction and evaluation ---------------------------------------- */

/* CSV with t, predicted states, reference states, error and status columns
 * for one episode of the dataset. */
KOOPID_API koopid_status koopid_predict(const koopid_model* model,
                                        const koopid_dataset* ds,
                                        const char* episode_id, char** csv);

/* Per-episode metrics for episodes of the given role ("train", "test" or
 * "all"), and the eigenvalue table of the dynamics matrix. */
KOOPID_API koopid_status koopid_evaluate(const koopid_model* model,
                                         const koopid_dataset* ds,
                                         const char* role, char** metrics_csv,
                                         char** eigen_csv);

typedef struct koopid_sweep_options {
  const char* methods; /* comma separated */
  const double* snr_db;
  size_t snr_count;
  uint64_t seed_base;
  int seed_count;
  int monomial_degree;
  int rbf_count;
  double alpha;
  double delta;
  uint64_t lifting_seed;
  double rho_bar;
  int threads; /* 0: hardware concurrency, capped by KOOPID_THREADS */
} koopid_sweep_options;

KOOPID_API void koopid_sweep_options_init(koopid_sweep_options* opts);

/* SNR sweep over the dataset's "train" episodes; tidy CSV output. */
KOOPID_API koopid_status koopid_sweep(const koopid_dataset* ds,
                                      const koopid_sweep_options* opts,
                                      char** csv);

#ifdef __cplusplus
}
#endif

#endif /* KOOPID_KOOPID_H_ */
