// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/levyfield.h"

#include <cstring>
#include <iostream>
#include <new>
#include <string>

#include "levyfield/app.hpp"
#include "levyfield/config.hpp"
#include "levyfield/error.hpp"
#include "levyfield/field.hpp"
#include "levyfield/noise.hpp"

struct lf_config {
  levyfield::RunConfig cfg;
};

struct lf_triplet {
  levyfield::LevyTriplet triplet;
};

struct lf_noise {
  levyfield::NoiseRealization z;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_usage;

lf_status to_status(levyfield::ErrorCode code) {
  using levyfield::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return LF_INVALID_ARGUMENT;
    case ErrorCode::kDomain: return LF_DOMAIN;
    case ErrorCode::kConvergence: return LF_CONVERGENCE;
    case ErrorCode::kDivergence: return LF_DIVERGENCE;
    case ErrorCode::kIo: return LF_IO;
    case ErrorCode::kConfig: return LF_CONFIG;
    case ErrorCode::kStudy: return LF_STUDY;
    case ErrorCode::kInternal: return LF_INTERNAL;
  }
  return LF_INTERNAL;
}

template <typename F>
lf_status guard(F&& f) {
  try {
    g_last_error.clear();
    f();
    return LF_OK;
  } catch (const levyfield::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LF_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LF_INTERNAL;
  }
}

lf_status null_argument(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return LF_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* lf_version(void) { return LEVYFIELD_VERSION; }

const char* lf_last_error(void) { return g_last_error.c_str(); }

lf_status lf_config_load(const char* path, lf_config** out) {
  if (!path || !out) return null_argument("path/out");
  *out = nullptr;
  return guard([&] { *out = new lf_config{levyfield::load_config(path)}; });
}

lf_status lf_config_parse(const char* yaml_text, lf_config** out) {
  if (!yaml_text || !out) return null_argument("yaml_text/out");
  *out = nullptr;
  return guard([&] { *out = new lf_config{levyfield::parse_config(yaml_text, "<string>")}; });
}

void lf_config_free(lf_config* cfg) { delete cfg; }

lf_status lf_config_seed(const lf_config* cfg, uint64_t* seed) {
  if (!cfg || !seed) return null_argument("cfg/seed");
  *seed = cfg->cfg.study.seed;
  return LF_OK;
}

lf_status lf_config_samples(const lf_config* cfg, size_t* samples) {
  if (!cfg || !samples) return null_argument("cfg/samples");
  *samples = cfg->cfg.study.samples;
  return LF_OK;
}

lf_status lf_config_hash(const lf_config* cfg, char* buffer, size_t size) {
  if (!cfg || !buffer) return null_argument("cfg/buffer");
  return guard([&] {
    const std::string h = levyfield::sha256_hex(cfg->cfg.text);
    levyfield::require(size > h.size(), "lf_config_hash: buffer needs 65 bytes");
    std::memcpy(buffer, h.c_str(), h.size() + 1);
  });
}

int lf_run(const char* subcommand, const char* config_path, const lf_overrides* overrides) {
  if (!subcommand || !config_path) {
    std::cerr << levyfield::usage();
    return levyfield::kExitConfig;
  }
  levyfield::RunOverrides ov;
  if (overrides) {
    if (overrides->has_seed) ov.seed = overrides->seed;
    if (overrides->has_samples) ov.samples = static_cast<std::size_t>(overrides->samples);
    if (overrides->workers > 0) ov.workers = overrides->workers;
    if (overrides->out_dir) ov.out = std::string(overrides->out_dir);
  }
  try {
    return levyfield::run(subcommand, config_path, ov, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return levyfield::kExitStudy;
  }
}

const char* lf_usage(const char* program) {
  g_usage = levyfield::usage(program ? program : "levyfield");
  return g_usage.c_str();
}

lf_status lf_matern_eval(double alpha, double m, int d, double r, double* value) {
  if (!value) return null_argument("value");
  return guard([&] {
    const levyfield::MaternKernel k{alpha, m, d};
    k.validate();
    levyfield::require(r >= 0.0, "lf_matern_eval: r must be >= 0");
    *value = levyfield::matern_eval(k, r);
  });
}

lf_status lf_triplet_create(double drift, double sigma2, lf_jump_kind kind, const double* atoms,
                            size_t count, double intensity, double decay, lf_triplet** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  return guard([&] {
    levyfield::JumpMeasure nu = levyfield::JumpMeasure::null();
    switch (kind) {
      case LF_JUMPS_NONE: break;
      case LF_JUMPS_DISCRETE: {
        levyfield::require(atoms && count > 0, "discrete measure needs atoms");
        std::vector<levyfield::DiscreteAtom> list;
        for (size_t i = 0; i < count; ++i) list.push_back({atoms[2 * i], atoms[2 * i + 1]});
        nu = levyfield::JumpMeasure::discrete(std::move(list));
        break;
      }
      case LF_JUMPS_GAMMA: nu = levyfield::JumpMeasure::gamma(intensity, decay); break;
      case LF_JUMPS_BIGAMMA: nu = levyfield::JumpMeasure::bigamma(intensity, decay); break;
      default: levyfield::fail(levyfield::ErrorCode::kInvalidArgument, "unknown jump kind");
    }
    levyfield::LevyTriplet t{drift, sigma2, nu};
    t.validate();
    *out = new lf_triplet{t};
  });
}

void lf_triplet_free(lf_triplet* t) { delete t; }

lf_status lf_triplet_characteristic(const lf_triplet* t, double arg, double* re, double* im) {
  if (!t || !re || !im) return null_argument("t/re/im");
  return guard([&] {
    const auto psi = levyfield::levy_characteristic(t->triplet, arg);
    *re = psi.real();
    *im = psi.imag();
  });
}

lf_status lf_noise_sample(const lf_triplet* t, int d, const double* lower, const double* upper,
                          const int* cells, uint64_t seed, lf_noise** out) {
  if (!t || !lower || !upper || !cells || !out) return null_argument("t/lower/upper/cells/out");
  *out = nullptr;
  return guard([&] {
    levyfield::require(d == 1 || d == 2, "lf_noise_sample: d must be 1 or 2");
    levyfield::CellGrid grid;
    grid.box = d == 1 ? levyfield::Box::interval(lower[0], upper[0])
                      : levyfield::Box::rectangle(lower[0], upper[0], lower[1], upper[1]);
    grid.cells = {cells[0], d == 2 ? cells[1] : 1};
    grid.validate();
    *out = new lf_noise{levyfield::sample_noise(t->triplet, grid, seed)};
  });
}

void lf_noise_free(lf_noise* z) { delete z; }

size_t lf_noise_cell_count(const lf_noise* z) { return z ? z->z.gaussian_cells.size() : 0; }

const double* lf_noise_gaussian_cells(const lf_noise* z) {
  return z ? z->z.gaussian_cells.data() : nullptr;
}

size_t lf_noise_atom_count(const lf_noise* z) { return z ? z->z.atoms.size() : 0; }

lf_status lf_noise_atom(const lf_noise* z, size_t i, double* x0, double* x1, double* s) {
  if (!z || !x0 || !x1 || !s) return null_argument("z/x0/x1/s");
  if (i >= z->z.atoms.size()) {
    g_last_error = "lf_noise_atom: index out of range";
    return LF_INVALID_ARGUMENT;
  }
  const auto& a = z->z.atoms[i];
  *x0 = a.x[0];
  *x1 = a.x[1];
  *s = a.s;
  return LF_OK;
}

double lf_noise_drift(const lf_noise* z) { return z ? z->z.drift : 0.0; }

lf_status lf_noise_apply(const lf_noise* z, const double* f, size_t count, double* value) {
  if (!z || !f || !value) return null_argument("z/f/value");
  return guard([&] {
    levyfield::require(count == z->z.grid.size(), "lf_noise_apply: one value per cell");
    *value = levyfield::apply_functional(z->z, std::vector<double>(f, f + count));
  });
}

lf_status lf_field_smooth(const lf_noise* z, double alpha, double m, const double* points,
                          size_t count, double* values) {
  if (!z || !points || !values) return null_argument("z/points/values");
  return guard([&] {
    const levyfield::MaternKernel k{alpha, m, z->z.grid.box.d};
    k.validate();
    std::vector<std::array<double, 2>> nodes(count);
    for (size_t i = 0; i < count; ++i) nodes[i] = {points[2 * i], points[2 * i + 1]};
    const auto eval = levyfield::EvalGrid::from_nodes(z->z.grid.box, std::move(nodes));
    levyfield::SmoothingOptions so;
    so.require_padding = false;
    const auto fr = levyfield::smooth_realization(z->z, k, eval, so);
    std::copy(fr.values.begin(), fr.values.end(), values);
  });
}

}  // extern "C"
