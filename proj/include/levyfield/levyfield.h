/* Copyright 2026 The levyfield Authors
 * SPDX-License-Identifier: Apache-2.0 */

#ifndef LEVYFIELD_LEVYFIELD_H_
#define LEVYFIELD_LEVYFIELD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(LF_BUILDING_LIBRARY)
#define LF_API __attribute__((visibility("default")))
#else
#define LF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lf_status {
  LF_OK = 0,
  LF_INVALID_ARGUMENT = 1,
  LF_DOMAIN = 2,
  LF_CONVERGENCE = 3,
  LF_DIVERGENCE = 4,
  LF_IO = 5,
  LF_CONFIG = 6,
  LF_STUDY = 7,
  LF_INTERNAL = 8
} lf_status;

typedef enum lf_jump_kind {
  LF_JUMPS_NONE = 0,
  LF_JUMPS_DISCRETE = 1,
  LF_JUMPS_GAMMA = 2,
  LF_JUMPS_BIGAMMA = 3
} lf_jump_kind;

typedef struct lf_config lf_config;
typedef struct lf_triplet lf_triplet;
typedef struct lf_noise lf_noise;

/* Library version string, e.g. "0.3.0". */
LF_API const char* lf_version(void);

/* Message of the last failed call on the calling thread ("" if none). */
LF_API const char* lf_last_error(void);

/* ---- configuration ---------------------------------------------------- */

LF_API lf_status lf_config_load(const char* path, lf_config** out);
LF_API lf_status lf_config_parse(const char* yaml_text, lf_config** out);
LF_API void lf_config_free(lf_config* cfg);
LF_API lf_status lf_config_seed(const lf_config* cfg, uint64_t* seed);
LF_API lf_status lf_config_samples(const lf_config* cfg, size_t* samples);
/* Lowercase hex SHA-256 of the configuration text, 65 bytes with the NUL. */
LF_API lf_status lf_config_hash(const lf_config* cfg, char* buffer, size_t size);

/* ---- command runner --------------------------------------------------- */

typedef struct lf_overrides {
  int has_seed;
  uint64_t seed;
  int has_samples;
  uint64_t samples;
  int workers;         /* <= 0 keeps the configured value */
  const char* out_dir; /* NULL keeps $LEVYFIELD_OUT or the configured value */
} lf_overrides;

/* Runs a subcommand on a configuration file. Returns the process exit
 * status: 0 ok, 1 study failure, 2 configuration error or unknown
 * subcommand. Progress is printed to stdout, diagnostics to stderr. */
LF_API int lf_run(const char* subcommand, const char* config_path, const lf_overrides* overrides);

/* Usage text; valid until the next call on the calling thread. */
LF_API const char* lf_usage(const char* program);

/* ---- numerical building blocks --------------------------------------- */

/* Matern kernel k_{alpha,m}(r) in dimension d. */
LF_API lf_status lf_matern_eval(double alpha, double m, int d, double r, double* value);

/* Triplet (drift, sigma2, nu). `atoms` holds `count` (location, mass) pairs
 * for LF_JUMPS_DISCRETE; `intensity` and `decay` parametrize the gamma kinds. */
LF_API lf_status lf_triplet_create(double drift, double sigma2, lf_jump_kind kind,
                                   const double* atoms, size_t count, double intensity,
                                   double decay, lf_triplet** out);
LF_API void lf_triplet_free(lf_triplet* t);
/* Real and imaginary part of the Levy characteristic psi(t). */
LF_API lf_status lf_triplet_characteristic(const lf_triplet* t, double arg, double* re,
                                           double* im);

/* Noise on the box [lower, upper] (d = 1 or 2) with `cells` cells per axis. */
LF_API lf_status lf_noise_sample(const lf_triplet* t, int d, const double* lower,
                                 const double* upper, const int* cells, uint64_t seed,
                                 lf_noise** out);
LF_API void lf_noise_free(lf_noise* z);
LF_API size_t lf_noise_cell_count(const lf_noise* z);
LF_API const double* lf_noise_gaussian_cells(const lf_noise* z);
LF_API size_t lf_noise_atom_count(const lf_noise* z);
/* Atom i as (x0, x1, s). */
LF_API lf_status lf_noise_atom(const lf_noise* z, size_t i, double* x0, double* x1, double* s);
LF_API double lf_noise_drift(const lf_noise* z);
/* Z(f) for `f` given by one value per cell. */
LF_API lf_status lf_noise_apply(const lf_noise* z, const double* f, size_t count, double* value);

/* Smoothed field Z_k at `count` points (2 coordinates each). The noise box
 * must contain the points. */
LF_API lf_status lf_field_smooth(const lf_noise* z, double alpha, double m,
                                 const double* points, size_t count, double* values);

#ifdef __cplusplus
}
#endif

#endif /* LEVYFIELD_LEVYFIELD_H_ */
