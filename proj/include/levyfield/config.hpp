// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "levyfield/experiments.hpp"

namespace levyfield {

/// Settings of the `sample` subcommand: one snapshot per noise type, all with
/// the same covariance variance * k_{2 alpha, m}.
struct SampleSettings {
  double variance = 1.0;         // sigma^2 + b_2 shared by the three triplets
  double poisson_jump = 1.0;     // atom location of the compound Poisson measure
  double bigamma_decay = 2.0;
  std::array<int, 2> snapshot_intervals{128, 64};
  std::size_t covariance_samples = 2000;
  std::vector<double> lags{0.0, 0.1, 0.25, 0.5, 1.0};
};

struct MercerSettings {
  std::array<int, 2> nodes{200, 0};
  double padding = 2.0;  // Mercer box = D padded by this distance
  int j_lo = 5;
  int j_hi = 50;
};

struct ValidateSettings {
  std::size_t samples = 2000;
};

/// A parsed and range-checked configuration file.
struct RunConfig {
  StudyConfig study;
  SampleSettings sample;
  MercerSettings mercer;
  ValidateSettings validate;
  std::string origin;  // file name used in diagnostics
  std::string text;    // raw bytes, hashed into the run manifest
};

/// Parses YAML text. Errors carry `origin:line:column` and the dotted key
/// path and are raised as Error(kConfig). Every numeric field is checked
/// against its admissible range; cross-field preconditions of the studies are
/// checked as well.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

/// Cross-field checks, rerun after command-line overrides.
void validate_config(const RunConfig& cfg);

}  // namespace levyfield
