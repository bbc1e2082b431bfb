// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace levyfield {

/// Philox4x32-10 block function (counter-based, keyed).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Stream tags separate the draws of different consumers of one seed.
enum class StreamTag : std::uint32_t {
  kGaussianCells = 1,
  kPoissonCount = 2,
  kAtoms = 3,
  kBootstrap = 4,
  kSampleSeed = 5,
  kTest = 6,
};

/// A random stream identified by (seed, tag, index). Draw k of the stream is a
/// pure function of (seed, tag, index, k), so realizations do not depend on
/// the order in which streams are consumed or on the thread that consumes
/// them. Satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, StreamTag tag, std::uint64_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()();

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

/// Derives an independent 64-bit seed for sample `index` of a study.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace levyfield
