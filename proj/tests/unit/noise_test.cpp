// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/noise.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>

#include "levyfield/error.hpp"
#include "levyfield/stats.hpp"

namespace levyfield {
namespace {

const CellGrid kUnit{Box::interval(0.0, 1.0), {10, 1}};

double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

bool same(const NoiseRealization& a, const NoiseRealization& b) {
  if (!(a.grid == b.grid) || a.drift != b.drift || a.seed != b.seed) return false;
  if (a.gaussian_cells != b.gaussian_cells || a.atoms.size() != b.atoms.size()) return false;
  for (std::size_t i = 0; i < a.atoms.size(); ++i) {
    if (a.atoms[i].x != b.atoms[i].x || a.atoms[i].s != b.atoms[i].s) return false;
  }
  return true;
}

TEST(Box, GeometryHelpers) {
  const Box b = Box::rectangle(0.0, 2.0, -1.0, 1.0);
  EXPECT_DOUBLE_EQ(b.volume(), 4.0);
  EXPECT_TRUE(b.contains(std::array<double, 2>{1.0, 0.0}));
  EXPECT_FALSE(b.contains(std::array<double, 2>{2.5, 0.0}));
  const Box p = b.padded(0.5);
  EXPECT_DOUBLE_EQ(p.volume(), 3.0 * 3.0);
  EXPECT_DOUBLE_EQ(b.distance_to_complement(p), 0.5);
  EXPECT_TRUE(p.contains(b));
}

TEST(CellGrid, InterpolationIsExactForLinearData) {
  const CellGrid g{Box::rectangle(0.0, 1.0, 0.0, 1.0), {8, 8}};
  const auto f = g.sample([](double x, double y) { return 2.0 * x - y + 0.5; });
  for (auto p : {std::array<double, 2>{0.3, 0.4}, {0.5, 0.5}, {0.77, 0.21}}) {
    EXPECT_NEAR(g.interpolate(f, p), 2.0 * p[0] - p[1] + 0.5, 1e-12);
  }
}

TEST(Sample, PoissonCountHasUnitMean) {
  const LevyTriplet t{0.0, 0.0, JumpMeasure::discrete({{1.0, 1.0}})};
  NoiseSampler sampler(t, kUnit);
  const std::size_t n = 100000;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += sampler.sample(derive_seed(11, i)).atoms.size();
  EXPECT_NEAR(sum / n, 1.0, 3e-2);
}

TEST(Sample, GaussianCellVariance) {
  const LevyTriplet t{0.0, 1.0, JumpMeasure::null()};
  const CellGrid g{Box::interval(0.0, 100.0), {1000, 1}};  // h = 0.1
  std::vector<double> cells;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto z = sample_noise(t, g, derive_seed(12, s));
    cells.insert(cells.end(), z.gaussian_cells.begin(), z.gaussian_cells.end());
  }
  ASSERT_EQ(cells.size(), 100000u);
  EXPECT_NEAR(summarize(cells).variance, 0.1, 0.005);
}

TEST(Sample, DeterministicTripletHasOnlyDrift) {
  const auto z = sample_noise({5.0, 0.0, JumpMeasure::null()}, kUnit, 1);
  EXPECT_TRUE(z.atoms.empty());
  for (double w : z.gaussian_cells) EXPECT_EQ(w, 0.0);
  EXPECT_EQ(z.drift, 5.0);
  EXPECT_DOUBLE_EQ(apply_functional(z, kUnit.indicator(kUnit.box)), 5.0);
}

TEST(Sample, AtomsInsideBox) {
  const CellGrid g{Box::rectangle(-1.0, 2.0, 0.5, 1.5), {6, 4}};
  const auto z = sample_noise({0.0, 0.0, JumpMeasure::gamma(3.0, 1.0)}, g, 3);
  ASSERT_FALSE(z.atoms.empty());
  for (const auto& a : z.atoms) EXPECT_TRUE(g.box.contains(a.x));
}

TEST(Sample, Reproducible) {
  const LevyTriplet t{0.2, 1.0, JumpMeasure::bigamma(1.0, 2.0)};
  const CellGrid g{Box::rectangle(0.0, 1.0, 0.0, 1.0), {5, 7}};
  EXPECT_TRUE(same(sample_noise(t, g, 99), sample_noise(t, g, 99)));
  EXPECT_FALSE(same(sample_noise(t, g, 99), sample_noise(t, g, 100)));
}

TEST(Sample, ZeroResolutionRejected) {
  const CellGrid bad{Box::interval(0.0, 1.0), {0, 1}};
  EXPECT_THROW(sample_noise({0.0, 1.0, JumpMeasure::null()}, bad, 1), Error);
}

TEST(Sample, DriftMovesSmallJumpCompensator) {
  // Unit jumps sit inside |s| <= 1, so their mean is moved out of the drift.
  NoiseSampler s({0.0, 0.0, JumpMeasure::discrete({{1.0, 1.0}})}, kUnit);
  EXPECT_DOUBLE_EQ(s.drift(), -1.0);
  NoiseSampler c({1.0, 0.0, JumpMeasure::discrete({{1.0, 1.0}})}, kUnit);
  EXPECT_DOUBLE_EQ(c.drift(), 0.0);
}

TEST(Functional, ZeroAndLinear) {
  const auto z = sample_noise({0.3, 1.0, JumpMeasure::gamma(2.0, 1.0)}, kUnit, 5);
  std::vector<double> zero(kUnit.size(), 0.0);
  EXPECT_EQ(apply_functional(z, zero), 0.0);
  const auto f = kUnit.sample([](double x, double) { return std::sin(3.0 * x) + 0.2; });
  std::vector<double> f2(f);
  for (double& v : f2) v *= 2.0;
  EXPECT_DOUBLE_EQ(apply_functional(z, f2), 2.0 * apply_functional(z, f));
}

TEST(Functional, UnitJumpsCountAtoms) {
  const auto one = kUnit.indicator(kUnit.box);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto z = sample_noise({0.0, 0.0, JumpMeasure::discrete({{1.0, 1.0}})}, kUnit, s);
    EXPECT_NEAR(apply_functional(z, one) - z.drift, static_cast<double>(z.atoms.size()),
                1e-12);
  }
}

TEST(Functional, GridMismatchRejected) {
  const auto z = sample_noise({0.0, 1.0, JumpMeasure::null()}, kUnit, 1);
  EXPECT_THROW(apply_functional(z, std::vector<double>(3, 1.0)), Error);
}

TEST(CharFunctional, ReferenceExamples) {
  const auto one = kUnit.indicator(kUnit.box);
  const auto g = reference_char_functional({0.0, 1.0, JumpMeasure::null()}, kUnit, one, 1.0);
  EXPECT_NEAR(g.real(), std::exp(-0.5), 1e-14);
  EXPECT_NEAR(g.imag(), 0.0, 1e-14);
  const auto p = reference_char_functional({1.0, 0.0, JumpMeasure::discrete({{1.0, 1.0}})},
                                           kUnit, one, M_PI);
  EXPECT_NEAR(p.real(), std::exp(-2.0), 1e-12);
  EXPECT_NEAR(p.imag(), 0.0, 1e-12);
}

TEST(CharFunctional, ZeroArgumentIsExactlyOne) {
  const auto one = kUnit.indicator(kUnit.box);
  const auto est = empirical_char_functional({0.0, 1.0, JumpMeasure::gamma(1.0, 2.0)}, kUnit,
                                             one, {0.0}, 10, 1);
  EXPECT_EQ(est[0].empirical, std::complex<double>(1.0, 0.0));
  EXPECT_EQ(est[0].reference, std::complex<double>(1.0, 0.0));
}

TEST(CharFunctional, EmpiricalWithinSamplingBound) {
  const auto f = kUnit.sample([](double x, double) { return 1.0 + x; });
  const std::size_t n = 20000;
  const auto est = empirical_char_functional({0.0, 0.5, JumpMeasure::bigamma(1.0, 2.0)},
                                             kUnit, f, {0.5, 1.0, 2.0}, n, 21);
  for (const auto& e : est) EXPECT_LE(e.error(), 4.0 / std::sqrt(double(n))) << "t = " << e.t;
}

TEST(Invariants, DisjointSupportsUncorrelated) {
  const LevyTriplet t{0.0, 1.0, JumpMeasure::gamma(1.0, 1.0)};
  NoiseSampler sampler(t, kUnit);
  const auto f = kUnit.indicator(Box::interval(0.0, 0.5));
  const auto g = kUnit.indicator(Box::interval(0.5, 1.0));
  const std::size_t n = 10000;
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = sampler.sample(derive_seed(31, i));
    a[i] = apply_functional(z, f);
    b[i] = apply_functional(z, g);
  }
  EXPECT_LE(std::abs(correlation(a, b)), 3.0 / std::sqrt(double(n)));
}

TEST(Invariants, GridShiftStationarity) {
  const LevyTriplet t{0.0, 1.0, JumpMeasure::gamma(2.0, 1.0)};
  NoiseSampler sampler(t, kUnit);
  const auto f = kUnit.indicator(Box::interval(0.1, 0.4));
  const auto g = kUnit.indicator(Box::interval(0.6, 0.9));
  const std::size_t n = 10000;
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = sampler.sample(derive_seed(32, i));
    a[i] = apply_functional(z, f);
    b[i] = apply_functional(z, g);
  }
  const auto sa = summarize(a), sb = summarize(b);
  EXPECT_NEAR(sa.mean, sb.mean, 3.0 * std::hypot(sa.std_error(), sb.std_error()));
  std::vector<double> a2(n), b2(n);
  for (std::size_t i = 0; i < n; ++i) {
    a2[i] = (a[i] - sa.mean) * (a[i] - sa.mean);
    b2[i] = (b[i] - sb.mean) * (b[i] - sb.mean);
  }
  const auto va = summarize(a2), vb = summarize(b2);
  EXPECT_NEAR(va.mean, vb.mean, 3.0 * std::hypot(va.std_error(), vb.std_error()));
}

TEST(Restrict, SplitsCellsAndAtoms) {
  const CellGrid g{Box::interval(0.0, 2.0), {20, 1}};
  const auto z = sample_noise({0.0, 1.0, JumpMeasure::gamma(5.0, 1.0)}, g, 8);
  const auto left = restrict_noise(z, Box::interval(0.0, 1.0));
  const auto right = restrict_noise(z, Box::interval(1.0, 2.0));
  EXPECT_EQ(left.grid.size() + right.grid.size(), g.size());
  EXPECT_EQ(left.atoms.size() + right.atoms.size(), z.atoms.size());
  EXPECT_THROW(restrict_noise(z, Box::interval(0.05, 1.0)), Error);
}

TEST(Merge, AddsPartsAndFunctionals) {
  const CellGrid g{Box::interval(0.0, 1.0), {16, 1}};
  const auto a = sample_noise({0.1, 1.0, JumpMeasure::null()}, g, 1);
  const auto b = sample_noise({0.0, 0.0, JumpMeasure::gamma(2.0, 1.0)}, g, 2);
  const auto m = merge_noise(a, b);
  const auto f = g.sample([](double x, double) { return x * x; });
  EXPECT_NEAR(apply_functional(m, f), apply_functional(a, f) + apply_functional(b, f), 1e-12);
}

TEST(Snapshot, RoundTripIsBitExact) {
  const CellGrid g{Box::rectangle(0.0, 1.0, 0.0, 2.0), {4, 6}};
  const auto z = sample_noise({0.25, 1.0, JumpMeasure::bigamma(2.0, 1.0)}, g, 77);
  const auto path =
      (std::filesystem::temp_directory_path() / "levyfield_noise_snapshot.bin").string();
  save_noise(z, path);
  const auto back = load_noise(path);
  std::filesystem::remove(path);
  EXPECT_TRUE(same(z, back));
}

TEST(Snapshot, RejectsForeignFile) {
  const auto path = (std::filesystem::temp_directory_path() / "levyfield_bad.bin").string();
  {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("not a snapshot", f);
    std::fclose(f);
  }
  EXPECT_THROW(load_noise(path), Error);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace levyfield
