// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end over the C API.

#include <cstdint>
#include <cstdio>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "levyfield/levyfield.h"

int main(int argc, char** argv) {
  CLI::App app{"levyfield: Levy noise fields, random elliptic problems and convergence studies"};
  app.set_version_flag("--version", std::string(lf_version()));

  std::string subcommand, config;
  std::uint64_t seed = 0, samples = 0;
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  std::string out;
  app.add_option("subcommand", subcommand, "sample | mercer | solve | moments | tails | "
                                           "cutoff-rate | kl-rate | validate")
      ->required();
  app.add_option("config", config, "YAML configuration file")->required();
  auto* seed_opt = app.add_option("--seed", seed, "base seed (overrides the config)");
  auto* samples_opt = app.add_option("--samples", samples, "Monte Carlo sample count")
                          ->check(CLI::Range(std::uint64_t{2}, std::uint64_t{100'000'000}));
  auto* workers_opt = app.add_option("--workers", workers, "worker threads")
                          ->check(CLI::Range(1, 4096));
  app.add_option("--out", out, "output directory (overrides LEVYFIELD_OUT and the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::fputs(lf_usage(argv[0]), stdout);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "%s\n%s", e.what(), lf_usage(argv[0]));
    return 2;
  }

  lf_overrides ov{};
  ov.has_seed = *seed_opt ? 1 : 0;
  ov.seed = seed;
  ov.has_samples = *samples_opt ? 1 : 0;
  ov.samples = samples;
  ov.workers = *workers_opt ? workers : 0;
  ov.out_dir = out.empty() ? nullptr : out.c_str();
  return lf_run(subcommand.c_str(), config.c_str(), &ov);
}
