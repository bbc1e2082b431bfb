// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/config.hpp"

#include <gtest/gtest.h>

#include <string>

#include "levyfield/error.hpp"

namespace levyfield {
namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "x.yaml");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << text;
  return "";
}

TEST(Config, DefaultsFromMinimalFile) {
  const auto c = parse_config("seed: 7\n", "x.yaml");
  EXPECT_EQ(c.study.seed, 7u);
  EXPECT_EQ(c.study.samples, 200u);
  EXPECT_EQ(c.study.problem.kernel.alpha, 1.0);
  EXPECT_EQ(c.study.problem.domain.d, 1);
  EXPECT_EQ(c.origin, "x.yaml");
  EXPECT_EQ(c.text, "seed: 7\n");
}

TEST(Config, ReferenceFileLoads) {
  const auto c = load_config(LEVYFIELD_SOURCE_DIR "/configs/reference.yaml");
  EXPECT_EQ(c.study.problem.triplet.nu.kind(), JumpMeasure::Kind::kGamma);
  EXPECT_EQ(c.study.problem.triplet.nu.decay(), 4.0);
  EXPECT_EQ(c.study.moment_orders, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(c.mercer.j_hi, 50);
}

TEST(Config, TwoDimensionalDomain) {
  const auto c = parse_config(
      "kernel:\n  alpha: 2.0\ndomain:\n  lower: [0.0, 0.0]\n  upper: [1.0, 2.0]\n"
      "mesh:\n  intervals: [8, 16]\n",
      "x.yaml");
  EXPECT_EQ(c.study.problem.domain.d, 2);
  EXPECT_EQ(c.study.problem.kernel.d, 2);
  EXPECT_EQ(c.study.problem.mesh_intervals[1], 16);
}

TEST(Config, DiagnosticsCarryPositionAndKey) {
  const std::string e = config_error("seed: 1\ntriplet:\n  sigma2: -1.0\n");
  EXPECT_NE(e.find("x.yaml:3:"), std::string::npos) << e;
  EXPECT_NE(e.find("triplet.sigma2"), std::string::npos) << e;
}

TEST(Config, UnknownKeysRejected) {
  const std::string e = config_error("seed: 1\nsampels: 10\n");
  EXPECT_NE(e.find("x.yaml:2:1"), std::string::npos) << e;
  EXPECT_NE(e.find("sampels"), std::string::npos) << e;
  EXPECT_NE(e.find("unknown key"), std::string::npos) << e;
  const std::string nested = config_error("kernel:\n  alpah: 2.0\n");
  EXPECT_NE(nested.find("kernel.alpah"), std::string::npos) << nested;
}

TEST(Config, RangeChecks) {
  EXPECT_NE(config_error("samples: 1\n").find("samples"), std::string::npos);
  EXPECT_NE(config_error("kernel:\n  alpha: 0.4\n").find("alpha"), std::string::npos);
  EXPECT_NE(config_error("kernel:\n  m: 0\n").find("kernel.m"), std::string::npos);
  EXPECT_NE(config_error("triplet:\n  jumps:\n    kind: gamma\n    decay: -1\n").find("decay"),
            std::string::npos);
  EXPECT_NE(config_error("tails:\n  holder_eta: 1.5\n").find("holder_eta"), std::string::npos);
  EXPECT_NE(config_error("moments:\n  orders: [2, 1]\n").find("orders"), std::string::npos);
}

TEST(Config, TypeAndSyntaxErrors) {
  EXPECT_NE(config_error("samples: many\n").find("samples"), std::string::npos);
  EXPECT_NE(config_error("samples: [1\n").find("x.yaml:"), std::string::npos);
  EXPECT_NE(config_error("triplet:\n  jumps:\n    kind: weird\n").find("kind"), std::string::npos);
  EXPECT_NE(config_error("").find("empty"), std::string::npos);
}

TEST(Config, CrossFieldChecks) {
  EXPECT_NE(config_error("domain:\n  lower: [0.0, 0.0]\n  upper: [1.0, 1.0]\n").find("alpha"),
            std::string::npos);
  EXPECT_NE(config_error("domain:\n  lower: [0.0, 0.0]\n  upper: [1.0, 1.0]\nmesh:\n  intervals: [8]\n"),
            "");
  EXPECT_NE(config_error("domain:\n  lower: [1.0]\n  upper: [0.0]\n"), "");
  EXPECT_NE(config_error("mercer:\n  j_lo: 10\n  j_hi: 5\n").find("j_hi"), std::string::npos);
  EXPECT_NE(config_error("triplet:\n  jumps:\n    kind: discrete\n    atoms: [[0.0, 1.0]]\n"), "");
}

TEST(Config, ValidateRerunsAfterOverrides) {
  auto c = parse_config("seed: 1\n", "x.yaml");
  EXPECT_NO_THROW(validate_config(c));
  c.study.samples = 1;
  EXPECT_THROW(validate_config(c), Error);
}

TEST(Config, MissingFileIsConfigError) {
  try {
    load_config("/nonexistent/levyfield.yaml");
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::kConfig || e.code() == ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace levyfield
