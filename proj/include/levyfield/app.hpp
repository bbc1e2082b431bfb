// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "levyfield/config.hpp"

namespace levyfield {

enum ExitStatus : int { kExitOk = 0, kExitStudy = 1, kExitConfig = 2 };

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<int> workers;
  std::optional<std::string> out;
};

/// Subcommand names in usage order.
const std::vector<std::string>& subcommands();
std::string usage(const std::string& program = "levyfield");

/// Hex SHA-256 of `data`.
std::string sha256_hex(const std::string& data);

/// Output directory: the override, else $LEVYFIELD_OUT, else the config value.
std::string resolve_output_dir(const RunConfig& cfg, const RunOverrides& ov);

/// Record of one run, written as manifest.json in the output directory.
struct RunManifest {
  std::string subcommand;
  std::string config_path;
  std::string config_sha256;
  std::string version;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  int workers = 1;
  std::string started;   // UTC, ISO 8601
  std::string finished;
  std::string status;    // "ok" or "failed"
  std::string failed_stage;
  std::string error;
  std::vector<std::string> files;  // relative to the output directory

  std::string to_json() const;
};

/// Runs one subcommand. Returns 0 on success, 1 on a study failure (the
/// manifest names the failed stage) and 2 for configuration errors or an
/// unknown subcommand. Progress goes to `out`, diagnostics to `err`.
int run(const std::string& subcommand, const std::string& config_path,
        const RunOverrides& overrides, std::ostream& out, std::ostream& err);

}  // namespace levyfield
