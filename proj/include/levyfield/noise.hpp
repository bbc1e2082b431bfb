// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "levyfield/measure.hpp"

namespace levyfield {

/// Axis-aligned box in R^d, d in {1, 2}. Unused components are zero.
struct Box {
  int d = 1;
  std::array<double, 2> lower{0.0, 0.0};
  std::array<double, 2> upper{1.0, 0.0};

  static Box interval(double a, double b);
  static Box rectangle(double x0, double x1, double y0, double y1);

  void validate() const;
  double volume() const;
  double width(int axis) const { return upper[axis] - lower[axis]; }
  bool contains(const std::array<double, 2>& x) const;
  bool contains(const Box& inner) const;
  /// Box grown by `pad` on every side.
  Box padded(double pad) const;
  /// Euclidean distance from this box to the complement of `outer`.
  double distance_to_complement(const Box& outer) const;
};

bool operator==(const Box& a, const Box& b);

/// Uniform cell partition of a box; cells are indexed row-major with the last
/// axis fastest.
struct CellGrid {
  Box box;
  std::array<int, 2> cells{1, 1};

  static CellGrid with_spacing(const Box& box, double h);

  void validate() const;
  std::size_t size() const;
  double spacing(int axis) const { return box.width(axis) / cells[axis]; }
  double cell_volume() const;
  std::array<double, 2> center(std::size_t index) const;
  std::array<int, 2> multi_index(std::size_t index) const;
  std::size_t flat_index(int i0, int i1) const;

  /// Cell averages of f approximated by the cell-center values.
  std::vector<double> sample(const std::function<double(double, double)>& f) const;
  /// Indicator of the cells whose centers lie in `region`.
  std::vector<double> indicator(const Box& region) const;
  /// Multilinear interpolation of cell-center values at x, constant beyond the
  /// outermost centers.
  double interpolate(const std::vector<double>& values,
                     const std::array<double, 2>& x) const;
};

bool operator==(const CellGrid& a, const CellGrid& b);

struct Atom {
  std::array<double, 2> x{0.0, 0.0};
  double s = 0.0;
};

/// One sample of the noise restricted to a box: independent Gaussian cell
/// integrals, the compound Poisson atoms and the effective drift.
struct NoiseRealization {
  CellGrid grid;
  std::vector<double> gaussian_cells;  // W_j ~ N(0, sigma2 * cell volume)
  std::vector<Atom> atoms;
  double drift = 0.0;  // b - int_{0<|s|<=1} s nu(ds) (+ absorbed small-jump mean)
  std::uint64_t seed = 0;
};

struct NoiseOptions {
  double drift_tolerance = 1e-3;  // bound on the discarded small-jump mean
  ShellOptions shells;
};

/// Effective drift of the sampled representation: the compensator of the
/// jumps below |s| = 1 is moved into the drift.
double effective_drift(const LevyTriplet& triplet);

/// Samples realizations for a fixed triplet and grid. Shell decompositions and
/// jump tables are built once; sample() is const and thread-safe.
class NoiseSampler {
 public:
  NoiseSampler(const LevyTriplet& triplet, const CellGrid& grid,
               const NoiseOptions& opts = {});

  NoiseRealization sample(std::uint64_t seed) const;

  const LevyTriplet& triplet() const { return triplet_; }
  const CellGrid& grid() const { return grid_; }
  const ShellDecomposition& shells() const { return shells_; }
  double drift() const { return drift_; }
  /// Expected atom count nu(|s| > threshold) * |box|.
  double expected_atoms() const { return shells_.total_mass * grid_.box.volume(); }

 private:
  LevyTriplet triplet_;
  CellGrid grid_;
  ShellDecomposition shells_;
  double drift_ = 0.0;
};

/// One-shot convenience wrapper around NoiseSampler.
NoiseRealization sample_noise(const LevyTriplet& triplet, const CellGrid& grid,
                              std::uint64_t seed, const NoiseOptions& opts = {});

/// Z(f) for f given by cell values on the realization's grid.
double apply_functional(const NoiseRealization& z, const std::vector<double>& f);

/// Reference characteristic functional exp(int psi(t f(x)) dx) with the
/// integral taken cellwise.
std::complex<double> reference_char_functional(const LevyTriplet& triplet,
                                               const CellGrid& grid,
                                               const std::vector<double>& f,
                                               double t);

struct CharFunctionalEstimate {
  double t = 0.0;
  std::complex<double> empirical;
  std::complex<double> reference;
  double error() const { return std::abs(empirical - reference); }
};

/// Mean of exp(i t Z(f)) over n independent realizations, for each t, next to
/// the reference value. Realization i uses derive_seed(seed, i).
std::vector<CharFunctionalEstimate> empirical_char_functional(
    const LevyTriplet& triplet, const CellGrid& grid, const std::vector<double>& f,
    const std::vector<double>& ts, std::size_t n_samples, std::uint64_t seed,
    const NoiseOptions& opts = {}, int workers = 1);

/// Restriction of a realization to a sub-box made of whole cells.
NoiseRealization restrict_noise(const NoiseRealization& z, const Box& sub);

/// Sum of two realizations on the same grid (cells added, atoms concatenated,
/// drifts added).
NoiseRealization merge_noise(const NoiseRealization& a, const NoiseRealization& b);

/// Binary snapshot (little-endian): "LFNZ", u32 version, u32 d, u32 cells[2],
/// f64 lower[2], f64 upper[2], f64 drift, u64 seed, u64 n_cells, f64 cells[],
/// u64 n_atoms, then (f64 x0, f64 x1, f64 s) per atom.
void save_noise(const NoiseRealization& z, const std::string& path);
NoiseRealization load_noise(const std::string& path);

}  // namespace levyfield
