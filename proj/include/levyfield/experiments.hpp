// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "levyfield/analysis.hpp"
#include "levyfield/fem.hpp"
#include "levyfield/field.hpp"
#include "levyfield/mercer.hpp"
#include "levyfield/noise.hpp"
#include "levyfield/stats.hpp"

namespace levyfield {

/// Random elliptic problem -div(T(Z_k) grad u) = f on D.
struct ProblemSpec {
  LevyTriplet triplet;
  MaternKernel kernel;
  TransformSpec transform = TransformSpec::exp();
  Box domain = Box::interval(0.0, 1.0);
  std::array<int, 2> mesh_intervals{32, 32};
  BoundarySides sides = all_dirichlet();
  double source = 1.0;
  double dirichlet_value = 0.0;
  double neumann_value = 0.0;
  /// Noise cells per mesh interval (noise spacing = mesh spacing / refine).
  int noise_refine = 1;
  /// Distance from D to the complement of the noise box; 0 selects
  /// decay_radius(k, 1e-8 k(0)).
  double padding = 0.0;
  NoiseOptions noise;

  void validate() const;
  double mesh_spacing(int axis) const;
  double noise_spacing(int axis) const { return mesh_spacing(axis) / noise_refine; }
  /// D padded by `pad` rounded up to whole noise cells.
  CellGrid noise_grid(double pad) const;
  double resolved_padding() const;
  Mesh mesh() const;
  FemData data(const Mesh& mesh) const;
};

/// Shared, immutable state for the per-sample pipeline
/// noise -> field -> coefficient -> FEM solution.
class SolutionPipeline {
 public:
  explicit SolutionPipeline(const ProblemSpec& problem);

  struct Sample {
    NoiseRealization noise;
    FieldRealization field;
    Coefficient coefficient;
    FemSolution solution;
  };

  Sample run(std::uint64_t seed) const;
  FemSolution solve(const std::vector<double>& field_values) const;

  const ProblemSpec& problem() const { return problem_; }
  const std::shared_ptr<const Mesh>& mesh() const { return mesh_; }
  const EvalGrid& eval_grid() const { return eval_; }
  const NoiseSampler& sampler() const { return *sampler_; }
  const FieldSmoother& smoother() const { return *smoother_; }
  const FemData& data() const { return data_; }

 private:
  ProblemSpec problem_;
  std::shared_ptr<const Mesh> mesh_;
  EvalGrid eval_;
  FemData data_;
  std::unique_ptr<NoiseSampler> sampler_;
  std::unique_ptr<FieldSmoother> smoother_;
};

struct StudyConfig {
  ProblemSpec problem;
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  int workers = 1;

  std::vector<int> moment_orders{1, 2};
  /// A priori constant for the series bound; 0 selects the homogeneous
  /// Dirichlet constant when it applies.
  double c_apriori = 0.0;
  /// Talagrand constant for the Gaussian tail; 0 means uncalibrated (1).
  double talagrand_k = 0.0;
  double holder_eta = 0.5;

  std::vector<double> tail_thresholds{0.0, 0.5, 1.0, 1.5, 2.0, 3.0};

  std::vector<double> cutoff_paddings{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  double reference_padding = 0.0;  // 0 selects max(paddings) + decay radius
  bool solution_level = true;

  std::vector<int> truncation_orders{5, 10, 15, 20, 25, 30, 35, 40};
  double kl_padding = 2.0;
  /// Joint schedule: Lambda_N from delta_N and N' = N.
  bool kl_combined = false;
  double kl_mtilde_ratio = 0.9;

  std::string output_dir = "out";

  void validate() const;
};

/// Per-sample seed: derive_seed(base, index).
std::uint64_t sample_seed(const StudyConfig& cfg, std::size_t index);

struct SampleFailure {
  std::uint64_t seed = 0;
  std::string message;
};

struct MomentEstimate {
  int order = 0;
  double mean = 0.0;
  double std_error = 0.0;
  ConfidenceInterval ci;
  double bound = 0.0;     // +inf when unavailable
  std::string bound_note;
};

struct MomentStudyResult {
  std::vector<double> norms;  // ||u||_{H^1} per successful sample, seed order
  std::vector<MomentEstimate> estimates;
  std::vector<SampleFailure> failures;
};

MomentStudyResult mc_solution_moments(const StudyConfig& cfg);

struct TailRow {
  double threshold = 0.0;
  double empirical = 0.0;           // P(sup_D |Z_k| >= j)
  double empirical_gaussian = 0.0;  // P(sup_D |G_k| >= j)
  double empirical_poisson = 0.0;   // P(sup_D |P_k| >= j)
  double talagrand = 0.0;           // 1 below the validity threshold
  double chernov = 0.0;             // displayed form, minimized over the grid
  double chernov_legendre = 0.0;
  double union_bound = 0.0;         // bound on the total supremum
};

struct TailStudyResult {
  std::vector<TailRow> rows;
  double calibrated_k = 0.0;
  TalagrandParameters talagrand;
  KernelEnvelope envelope;
  std::vector<double> sup_total;
  std::vector<double> sup_gaussian;
  std::vector<double> sup_poisson;
};

TailStudyResult tail_study(const StudyConfig& cfg);

struct CutoffStudyResult {
  std::vector<double> distances;                 // d_e(D, Lambda_N^c)
  double reference_distance = 0.0;
  std::vector<std::vector<double>> field_errors; // [sample][level]
  std::vector<double> mean_field_errors;
  RateFit field_fit;
  std::vector<std::vector<double>> solution_errors;
  std::vector<double> mean_solution_errors;
  RateFit solution_fit;
  int monotonicity_violations = 0;               // seeds with a non-monotone error path
};

CutoffStudyResult cutoff_rate_study(const StudyConfig& cfg);

struct KlStudyResult {
  std::vector<int> orders;
  int rank = 0;
  std::vector<double> box_volume;                // |Lambda_N| per order
  std::vector<double> kappa;                     // kappa_{r,N,N'} per order
  std::vector<std::vector<double>> solution_errors;  // [sample][order]
  std::vector<std::vector<double>> field_errors;
  std::vector<double> mean_solution_errors;
  std::vector<double> mean_field_errors;
  /// Per-seed sensitivity bound sup|T'| sup|dZ| ((1 + sup a) / inf a^2 + 1 / inf a).
  std::vector<std::vector<double>> sensitivity;
  /// Per-seed perturbation ||(T(Z) - T(Z_N)) grad u||_{L^2} / inf T(Z_N), u the
  /// reference solution.
  std::vector<std::vector<double>> flux_sensitivity;
  std::vector<double> correlation;        // sensitivity bound vs solution error, per order
  std::vector<double> flux_correlation;   // flux perturbation vs solution error, per order
  std::vector<double> sensitivity_ratio;  // max over seeds of error / sensitivity bound
  RateFit fit;
  RateFit field_fit;
  RateFit kappa_fit;
};

KlStudyResult kl_rate_study(const StudyConfig& cfg);

}  // namespace levyfield
