// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "levyfield/matern.hpp"
#include "levyfield/noise.hpp"

namespace levyfield {

/// Evaluation nodes inside a region D.
struct EvalGrid {
  Box region;
  std::vector<std::array<double, 2>> nodes;

  /// Vertex lattice with `intervals` subintervals per axis (row-major, last
  /// axis fastest).
  static EvalGrid lattice(const Box& region, std::array<int, 2> intervals);
  static EvalGrid from_nodes(const Box& region, std::vector<std::array<double, 2>> nodes);

  std::size_t size() const { return nodes.size(); }
};

/// Z_k at the nodes, split into its three parts. values = drift + gaussian +
/// jump nodewise.
struct FieldRealization {
  EvalGrid grid;
  std::vector<double> gaussian;
  std::vector<double> jump;
  std::vector<double> drift;
  std::vector<double> values;
  MaternKernel kernel;
  Box noise_box;
  std::uint64_t seed = 0;

  /// Recomputes values from the parts.
  void sum_parts();
};

struct SmoothingOptions {
  /// Absolute level defining the required padding decay_radius(k, pad_tol).
  double pad_tol = 1e-8;
  /// Reject noise boxes that do not contain D padded by that radius.
  bool require_padding = true;
  /// Atoms farther than decay_radius(k, skip_tol * k(0)) from a node are skipped.
  double skip_tol = 1e-16;
};

/// Padding of D prescribed for the cut-off box Lambda_N:
/// max(decay_radius(k, 1e-8), (2 / m~) (alpha/d - 1) log N), m~ = 0.9 m.
double default_cutoff_padding(const MaternKernel& k, double n);

/// Smooths noise realizations on a fixed noise grid into fields on a fixed
/// evaluation grid. Kernel transforms, FFT plans and drift integrals are
/// computed once; smooth() is const and thread-safe.
class FieldSmoother {
 public:
  FieldSmoother(const MaternKernel& k, const CellGrid& noise_grid,
                const EvalGrid& eval, const SmoothingOptions& opts = {});
  ~FieldSmoother();
  FieldSmoother(const FieldSmoother&) = delete;
  FieldSmoother& operator=(const FieldSmoother&) = delete;

  FieldRealization smooth(const NoiseRealization& z) const;

  /// sum_j W_j k(x - c_j) at the nodes.
  std::vector<double> gaussian_part(const std::vector<double>& cells) const;
  /// sum_atoms S k(x - X) at the nodes; with `absolute`, |S| is used.
  std::vector<double> jump_part(const std::vector<Atom>& atoms, bool absolute = false) const;
  /// int_{Lambda} k(x - y) dy at the nodes.
  const std::vector<double>& kernel_mass() const { return kernel_mass_; }
  /// True when the Gaussian part uses the FFT path.
  bool uses_fft() const { return fft_ != nullptr; }

  const MaternKernel& kernel() const { return k_; }
  const CellGrid& noise_grid() const { return grid_; }
  const EvalGrid& eval_grid() const { return eval_; }

 private:
  struct FftPath;
  MaternKernel k_;
  CellGrid grid_;
  EvalGrid eval_;
  SmoothingOptions opts_;
  double skip_radius_ = 0.0;
  std::vector<double> kernel_mass_;
  std::unique_ptr<FftPath> fft_;
};

FieldRealization smooth_realization(const NoiseRealization& z, const MaternKernel& k,
                                    const EvalGrid& eval,
                                    const SmoothingOptions& opts = {});

/// Positivity transform T with certified bounds
///   B^{-1} e^{-rho |z|^h} <= T(z) <= B e^{rho |z|^h},  |T'(z)| <= B e^{rho |z|^h}.
class TransformSpec {
 public:
  enum class Kind { kExp, kSmoothedStep, kTemperedExp };

  static TransformSpec exp();
  static TransformSpec smoothed_step(double low, double high, double width);
  /// T(z) = exp(rho sign(z) ((|z| + eps0)^h - eps0^h)), eps0 = 1e-3.
  static TransformSpec tempered_exp(double h, double rho);

  /// Replaces the derived bounds with declared ones; verified like the
  /// derived ones.
  TransformSpec with_bounds(double B, double rho, double h) const;

  Kind kind() const { return kind_; }
  double operator()(double z) const;
  double derivative(double z) const;
  double B() const { return B_; }
  double rho() const { return rho_; }
  double h() const { return h_; }
  /// e^{rho |z|^h} with the convention |z|^0 = 1.
  double envelope(double z) const;
  std::string describe() const;

  /// Dense check of the bounds on [-50, 50]; throws Error(kDomain) with the
  /// violating point.
  void verify() const;

 private:
  Kind kind_ = Kind::kExp;
  double p0_ = 0.0, p1_ = 0.0, p2_ = 0.0;
  double B_ = 1.0, rho_ = 1.0, h_ = 1.0;
};

struct Coefficient {
  std::vector<double> values;
  double min = 0.0;
  double max = 0.0;
};

Coefficient transform_field(const FieldRealization& fr, const TransformSpec& T);

/// max |Z_k| over the nodes inside `region` (a lower bound of the continuum sup).
double sup_abs(const FieldRealization& fr, const Box& region);
double sup_abs(const std::vector<double>& values, const EvalGrid& grid, const Box& region);

struct DominationResult {
  bool ok = true;
  std::size_t worst_node = 0;
  double worst_excess = 0.0;     // max (|P_k| - |P|_|k|), <= 0 when ok
  double max_gap = 0.0;          // max (|P|_|k| - |P_k|)
};

/// Checks |sum S k(x-X)| <= sum |S| |k(x-X)| at every node.
DominationResult domination_check(const FieldSmoother& smoother,
                                  const NoiseRealization& z);

}  // namespace levyfield
