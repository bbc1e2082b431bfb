// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "levyfield/error.hpp"
#include "levyfield/rng.hpp"
#include "parallel.hpp"

namespace levyfield {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename T>
void require_sorted(const std::vector<T>& v, const std::string& name) {
  std::ostringstream os;
  os << "study config: " << name << " must be nonempty and strictly increasing";
  require(!v.empty(), os.str(), ErrorCode::kConfig);
  for (std::size_t i = 1; i < v.size(); ++i) require(v[i - 1] < v[i], os.str(), ErrorCode::kConfig);
}

std::vector<double> difference(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

double max_abs_difference(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> column_means(const std::vector<std::vector<double>>& rows, std::size_t cols) {
  std::vector<double> out(cols, 0.0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < cols; ++j) out[j] += r[j];
  }
  for (double& v : out) v /= static_cast<double>(rows.size());
  return out;
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t j) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[j]);
  return out;
}

double survival(const std::vector<double>& sups, double j) {
  std::size_t c = 0;
  for (double s : sups) c += s >= j ? 1 : 0;
  return static_cast<double>(c) / static_cast<double>(sups.size());
}

// Noise grid over x0 + [-half, half] per axis, snapped outward to the cells
// of the problem's noise lattice.
CellGrid centered_grid(const ProblemSpec& p, std::array<double, 2> half) {
  CellGrid g;
  g.box = p.domain;
  for (int a = 0; a < p.domain.d; ++a) {
    const double h = p.noise_spacing(a);
    const double pad = std::max(0.0, half[a] - 0.5 * p.domain.width(a));
    const int extra = static_cast<int>(std::ceil(pad / h - 1e-9));
    const int inner = p.mesh_intervals[a] * p.noise_refine;
    g.box.lower[a] = p.domain.lower[a] - extra * h;
    g.box.upper[a] = p.domain.lower[a] + (inner + extra) * h;
    g.cells[a] = inner + 2 * extra;
  }
  if (p.domain.d == 1) g.cells[1] = 1;
  g.validate();
  return g;
}

}  // namespace

void ProblemSpec::validate() const {
  triplet.validate();
  kernel.validate();
  domain.validate();
  require(kernel.d == domain.d, "problem: kernel and domain dimensions differ", ErrorCode::kConfig);
  for (int a = 0; a < domain.d; ++a) {
    require(mesh_intervals[a] >= 1, "problem: mesh intervals must be >= 1", ErrorCode::kConfig);
  }
  require(noise_refine >= 1, "problem: noise refinement must be >= 1", ErrorCode::kConfig);
  require(padding >= 0.0 && std::isfinite(padding), "problem: padding must be >= 0",
          ErrorCode::kConfig);
  require(std::isfinite(source) && std::isfinite(dirichlet_value) && std::isfinite(neumann_value),
          "problem: boundary and source data must be finite", ErrorCode::kConfig);
  transform.verify();
}

double ProblemSpec::mesh_spacing(int axis) const {
  return domain.width(axis) / mesh_intervals[axis];
}

CellGrid ProblemSpec::noise_grid(double pad) const {
  require(pad >= 0.0, "noise_grid: padding must be >= 0");
  std::array<double, 2> half{0.0, 0.0};
  for (int a = 0; a < domain.d; ++a) half[a] = 0.5 * domain.width(a) + pad;
  return centered_grid(*this, half);
}

double ProblemSpec::resolved_padding() const {
  return padding > 0.0 ? padding : decay_radius(kernel, SmoothingOptions{}.pad_tol);
}

Mesh ProblemSpec::mesh() const {
  if (domain.d == 1) {
    return Mesh::interval(domain.lower[0], domain.upper[0], mesh_intervals[0], sides);
  }
  return Mesh::rectangle(domain, mesh_intervals[0], mesh_intervals[1], sides);
}

FemData ProblemSpec::data(const Mesh& m) const {
  return FemData::constant(m, source, dirichlet_value, neumann_value);
}

SolutionPipeline::SolutionPipeline(const ProblemSpec& problem) : problem_(problem) {
  problem_.validate();
  mesh_ = std::make_shared<const Mesh>(problem_.mesh());
  eval_ = EvalGrid::from_nodes(problem_.domain, mesh_->vertices);
  data_ = problem_.data(*mesh_);
  const CellGrid grid = problem_.noise_grid(problem_.resolved_padding());
  sampler_ = std::make_unique<NoiseSampler>(problem_.triplet, grid, problem_.noise);
  SmoothingOptions so;
  so.require_padding = problem_.padding == 0.0;
  smoother_ = std::make_unique<FieldSmoother>(problem_.kernel, grid, eval_, so);
}

SolutionPipeline::Sample SolutionPipeline::run(std::uint64_t seed) const {
  Sample s;
  s.noise = sampler_->sample(seed);
  s.field = smoother_->smooth(s.noise);
  s.coefficient = transform_field(s.field, problem_.transform);
  s.solution = assemble_solve(mesh_, s.coefficient.values, data_);
  return s;
}

FemSolution SolutionPipeline::solve(const std::vector<double>& field_values) const {
  require(field_values.size() == mesh_->num_vertices(), "pipeline: one field value per vertex");
  std::vector<double> a(field_values.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = problem_.transform(field_values[i]);
  return assemble_solve(mesh_, a, data_);
}

void StudyConfig::validate() const {
  problem.validate();
  require(samples >= 2, "study config: sample count must be >= 2", ErrorCode::kConfig);
  require(workers >= 1, "study config: worker count must be >= 1", ErrorCode::kConfig);
  require_sorted(moment_orders, "moment_orders");
  require(moment_orders.front() >= 1, "study config: moment orders must be >= 1",
          ErrorCode::kConfig);
  require(c_apriori >= 0.0 && talagrand_k >= 0.0,
          "study config: c_apriori and talagrand_k must be >= 0", ErrorCode::kConfig);
  require(holder_eta > 0.0 && holder_eta <= 1.0, "study config: holder_eta must lie in (0, 1]",
          ErrorCode::kConfig);
  require_sorted(tail_thresholds, "tail_thresholds");
  require(tail_thresholds.front() >= 0.0, "study config: tail thresholds must be >= 0",
          ErrorCode::kConfig);
  require_sorted(cutoff_paddings, "cutoff_paddings");
  require(cutoff_paddings.front() > 0.0, "study config: cut-off paddings must be > 0",
          ErrorCode::kConfig);
  require(reference_padding >= 0.0, "study config: reference_padding must be >= 0",
          ErrorCode::kConfig);
  require_sorted(truncation_orders, "truncation_orders");
  require(truncation_orders.front() >= 1, "study config: truncation orders must be >= 1",
          ErrorCode::kConfig);
  require(kl_padding > 0.0, "study config: kl_padding must be > 0", ErrorCode::kConfig);
  require(kl_mtilde_ratio > 0.0 && kl_mtilde_ratio < 1.0,
          "study config: kl_mtilde_ratio must lie in (0, 1)", ErrorCode::kConfig);
}

std::uint64_t sample_seed(const StudyConfig& cfg, std::size_t index) {
  return derive_seed(cfg.seed, index);
}

MomentStudyResult mc_solution_moments(const StudyConfig& cfg) {
  cfg.validate();
  const SolutionPipeline pipe(cfg.problem);
  const std::size_t n = cfg.samples;
  std::vector<double> norms(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> errors(n);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    try {
      norms[i] = pipe.run(sample_seed(cfg, i)).solution.h1;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  MomentStudyResult out;
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i].empty()) {
      out.norms.push_back(norms[i]);
    } else {
      out.failures.push_back({sample_seed(cfg, i), errors[i]});
    }
  }
  if (static_cast<double>(out.failures.size()) > 0.01 * static_cast<double>(n)) {
    std::ostringstream os;
    os << "moment study aborted: " << out.failures.size() << " of " << n
       << " samples failed; first failure (seed " << out.failures.front().seed
       << "): " << out.failures.front().message;
    fail(ErrorCode::kStudy, os.str());
  }

  const Box& D = cfg.problem.domain;
  double c_apriori = cfg.c_apriori;
  const bool homogeneous_dirichlet =
      cfg.problem.dirichlet_value == 0.0 &&
      std::all_of(cfg.problem.sides.begin(), cfg.problem.sides.begin() + 2 * D.d,
                  [](BoundaryKind k) { return k == BoundaryKind::kDirichlet; });
  if (c_apriori == 0.0 && homogeneous_dirichlet) c_apriori = dirichlet_apriori_constant(D);
  const double dn = data_norm(*pipe.mesh(), pipe.data());

  for (int order : cfg.moment_orders) {
    MomentEstimate est;
    est.order = order;
    std::vector<double> powered(out.norms.size());
    for (std::size_t i = 0; i < powered.size(); ++i) powered[i] = std::pow(out.norms[i], order);
    const Summary s = summarize(powered);
    est.mean = s.mean;
    est.std_error = s.std_error();
    est.ci = bootstrap_mean_ci(powered, derive_seed(cfg.seed, 0x424f4f54ULL + order));
    est.bound = kInf;
    if (c_apriori == 0.0) {
      est.bound_note = "a priori constant unavailable for this boundary configuration";
    } else {
      try {
        const SupTailBound tail(cfg.problem.triplet, cfg.problem.kernel, D,
                                cfg.talagrand_k > 0.0 ? cfg.talagrand_k : 1.0, cfg.holder_eta);
        const SeriesBound sb =
            moment_series_bound(cfg.problem.transform, order, tail, dn, c_apriori);
        est.bound = sb.value;
        est.bound_note = sb.certificate;
      } catch (const Error& e) {
        est.bound_note = e.what();
      }
    }
    out.estimates.push_back(est);
  }
  return out;
}

TailStudyResult tail_study(const StudyConfig& cfg) {
  cfg.validate();
  const ProblemSpec& p = cfg.problem;
  const CellGrid grid = p.noise_grid(p.resolved_padding());
  const NoiseSampler sampler(p.triplet, grid, p.noise);
  const Mesh mesh = p.mesh();
  const EvalGrid eval = EvalGrid::from_nodes(p.domain, mesh.vertices);
  SmoothingOptions so;
  so.require_padding = p.padding == 0.0;
  const FieldSmoother smoother(p.kernel, grid, eval, so);

  const std::size_t n = cfg.samples;
  TailStudyResult out;
  out.sup_total.assign(n, 0.0);
  out.sup_gaussian.assign(n, 0.0);
  out.sup_poisson.assign(n, 0.0);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    const FieldRealization fr = smoother.smooth(sampler.sample(sample_seed(cfg, i)));
    out.sup_total[i] = sup_abs(fr.values, fr.grid, p.domain);
    out.sup_gaussian[i] = sup_abs(fr.gaussian, fr.grid, p.domain);
    out.sup_poisson[i] = sup_abs(fr.jump, fr.grid, p.domain);
  });

  const bool gauss = p.triplet.sigma2 > 0.0;
  const bool poisson = !p.triplet.nu.is_null();
  out.envelope = kernel_envelope(p.kernel, p.domain);
  double K = cfg.talagrand_k;
  if (gauss) {
    out.talagrand = talagrand_parameters(p.triplet.sigma2, p.kernel, cfg.holder_eta, p.domain);
    std::vector<double> g = out.sup_gaussian;
    std::sort(g.begin(), g.end());
    std::vector<double> emp(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      // P(sup >= g_(i)) over the sorted sample (ties share the largest count).
      const auto first = std::lower_bound(g.begin(), g.end(), g[i]);
      emp[i] = static_cast<double>(g.end() - first) / static_cast<double>(g.size());
    }
    out.calibrated_k = calibrate_talagrand_k(out.talagrand, g, emp);
    if (K == 0.0) K = out.calibrated_k > 0.0 ? out.calibrated_k : 1.0;
  }
  if (K == 0.0) K = 1.0;
  const ChernovGrid cg = poisson ? ChernovGrid::for_measure(p.triplet.nu) : ChernovGrid{};
  const SupTailBound total(p.triplet, p.kernel, p.domain, K, cfg.holder_eta, true, cg);

  for (double j : cfg.tail_thresholds) {
    TailRow r;
    r.threshold = j;
    r.empirical = survival(out.sup_total, j);
    r.empirical_gaussian = survival(out.sup_gaussian, j);
    r.empirical_poisson = survival(out.sup_poisson, j);
    if (gauss) {
      r.talagrand = j >= talagrand_threshold(out.talagrand.sigma_bar, out.talagrand.v)
                        ? std::min(1.0, talagrand_bound(out.talagrand.sigma_bar, out.talagrand.A,
                                                        out.talagrand.v, K, j))
                        : 1.0;
    } else {
      r.talagrand = j > 0.0 ? 0.0 : 1.0;
    }
    if (poisson && j > 0.0) {
      double best = 0.0;
      for (double b : cg.beta) {
        for (double t : cg.tau) {
          best = std::min(best, chernov_log_bound(p.triplet.nu, b, out.envelope.kappa1,
                                                  out.envelope.kappa_inf, t, j));
        }
      }
      r.chernov = std::exp(best);
      r.chernov_legendre = chernov_legendre_bound(p.triplet.nu, p.kernel, p.domain, j);
    } else {
      r.chernov = r.chernov_legendre = (poisson || j <= 0.0) ? 1.0 : 0.0;
    }
    r.union_bound = total(j);
    out.rows.push_back(r);
  }
  return out;
}

CutoffStudyResult cutoff_rate_study(const StudyConfig& cfg) {
  cfg.validate();
  const ProblemSpec& p = cfg.problem;
  const double max_pad = cfg.cutoff_paddings.back();
  const double ref_pad = cfg.reference_padding > 0.0
                             ? cfg.reference_padding
                             : max_pad + decay_radius(p.kernel, SmoothingOptions{}.pad_tol);
  if (!(ref_pad >= max_pad + 1.0 / p.kernel.m)) {
    std::ostringstream os;
    os << "cut-off study: reference padding " << ref_pad
       << " is indistinct from the largest sweep padding " << max_pad
       << " (needs at least one correlation length 1/m = " << 1.0 / p.kernel.m << " more)";
    fail(ErrorCode::kStudy, os.str());
  }
  const CellGrid ref_grid = p.noise_grid(ref_pad);
  const NoiseSampler sampler(p.triplet, ref_grid, p.noise);
  auto mesh = std::make_shared<const Mesh>(p.mesh());
  const EvalGrid eval = EvalGrid::from_nodes(p.domain, mesh->vertices);
  const FemData data = p.data(*mesh);
  SmoothingOptions so;
  so.require_padding = false;
  const FieldSmoother ref_smoother(p.kernel, ref_grid, eval, so);

  CutoffStudyResult out;
  out.reference_distance = p.domain.distance_to_complement(ref_grid.box);
  std::vector<CellGrid> grids;
  std::vector<std::unique_ptr<FieldSmoother>> smoothers;
  for (double pad : cfg.cutoff_paddings) {
    grids.push_back(p.noise_grid(pad));
    out.distances.push_back(p.domain.distance_to_complement(grids.back().box));
    smoothers.push_back(std::make_unique<FieldSmoother>(p.kernel, grids.back(), eval, so));
  }
  const std::size_t levels = grids.size();
  const std::size_t n = cfg.samples;
  out.field_errors.assign(n, std::vector<double>(levels, 0.0));
  if (cfg.solution_level) out.solution_errors.assign(n, std::vector<double>(levels, 0.0));

  auto solve = [&](const std::vector<double>& z) {
    std::vector<double> a(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) a[i] = p.transform(z[i]);
    return assemble_solve(mesh, a, data);
  };
  parallel_for(n, cfg.workers, [&](std::size_t s) {
    const NoiseRealization z = sampler.sample(sample_seed(cfg, s));
    const FieldRealization ref = ref_smoother.smooth(z);
    FemSolution u_ref;
    if (cfg.solution_level) u_ref = solve(ref.values);
    for (std::size_t l = 0; l < levels; ++l) {
      const FieldRealization fl = smoothers[l]->smooth(restrict_noise(z, grids[l].box));
      out.field_errors[s][l] = max_abs_difference(ref.values, fl.values);
      if (cfg.solution_level) {
        const FemSolution ul = solve(fl.values);
        out.solution_errors[s][l] = h1_norm(*mesh, difference(u_ref.values, ul.values));
      }
    }
  });

  for (const auto& row : out.field_errors) {
    for (std::size_t l = 1; l < levels; ++l) {
      if (row[l] > row[l - 1] * (1.0 + 1e-9) + 1e-15) {
        ++out.monotonicity_violations;
        break;
      }
    }
  }
  out.mean_field_errors = column_means(out.field_errors, levels);
  out.field_fit = fit_rate(out.distances, out.mean_field_errors, false);
  if (cfg.solution_level) {
    out.mean_solution_errors = column_means(out.solution_errors, levels);
    out.solution_fit = fit_rate(out.distances, out.mean_solution_errors, false);
  }
  return out;
}

namespace {

struct KlLevel {
  CellGrid grid;
  std::shared_ptr<const MercerBasis> basis;
  std::unique_ptr<TruncatedFieldEvaluator> evaluator;
  int order = 0;
};

std::shared_ptr<const MercerBasis> kl_basis(const ProblemSpec& p, const CellGrid& grid,
                                            int needed) {
  auto basis = std::make_shared<const MercerBasis>(
      nystrom_eig(p.kernel, grid.box, grid.cells, MercerOptions{}));
  if (basis->rank < needed) {
    std::ostringstream os;
    os << "KL study: Mercer basis rank " << basis->rank << " on " << grid.size()
       << " nodes is below the required " << needed;
    fail(ErrorCode::kDomain, os.str());
  }
  return basis;
}

}  // namespace

KlStudyResult kl_rate_study(const StudyConfig& cfg) {
  cfg.validate();
  const ProblemSpec& p = cfg.problem;
  auto mesh = std::make_shared<const Mesh>(p.mesh());
  const EvalGrid eval = EvalGrid::from_nodes(p.domain, mesh->vertices);
  const FemData data = p.data(*mesh);
  const std::size_t n = cfg.samples;
  const std::size_t count = cfg.truncation_orders.size();
  const int max_order = cfg.truncation_orders.back();

  KlStudyResult out;
  out.orders = cfg.truncation_orders;
  out.solution_errors.assign(n, std::vector<double>(count, 0.0));
  out.field_errors.assign(n, std::vector<double>(count, 0.0));
  out.sensitivity.assign(n, std::vector<double>(count, 0.0));
  out.flux_sensitivity.assign(n, std::vector<double>(count, 0.0));

  auto solve = [&](const std::vector<double>& z) {
    std::vector<double> a(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) a[i] = p.transform(z[i]);
    return assemble_solve(mesh, a, data);
  };
  auto record = [&](std::size_t s, std::size_t l, const std::vector<double>& ref_field,
                    const FemSolution& u_ref, const std::vector<double>& field) {
    out.field_errors[s][l] = max_abs_difference(ref_field, field);
    const FemSolution u = solve(field);
    out.solution_errors[s][l] = h1_norm(*mesh, difference(u_ref.values, u.values));
    // Sensitivity bound sup|T'| sup|dZ| ((1 + sup a) / (inf a)^2 + 1 / inf a),
    // extrema taken over both fields.
    double tp = 0.0, amin = kInf, amax = 0.0;
    for (const auto* z : {&ref_field, &field}) {
      for (double v : *z) {
        const double a = p.transform(v);
        tp = std::max(tp, std::abs(p.transform.derivative(v)));
        amin = std::min(amin, a);
        amax = std::max(amax, a);
      }
    }
    out.sensitivity[s][l] =
        tp * out.field_errors[s][l] * ((1.0 + amax) / (amin * amin) + 1.0 / amin);
    std::vector<double> da(field.size());
    double amin_n = kInf;
    for (std::size_t i = 0; i < field.size(); ++i) {
      const double an = p.transform(field[i]);
      da[i] = p.transform(ref_field[i]) - an;
      amin_n = std::min(amin_n, an);
    }
    out.flux_sensitivity[s][l] = flux_norm(*mesh, da, u_ref.values) / amin_n;
  };

  if (!cfg.kl_combined) {
    const CellGrid grid = p.noise_grid(cfg.kl_padding);
    auto basis = kl_basis(p, grid, 2 * max_order);
    out.rank = basis->rank;
    const TruncatedFieldEvaluator ev(basis, grid, eval, basis->rank);
    const NoiseSampler sampler(p.triplet, grid, p.noise);
    out.kappa = remainder_bounds(*basis, out.orders, p.domain);
    out.box_volume.assign(count, grid.box.volume());
    parallel_for(n, cfg.workers, [&](std::size_t s) {
      const NoiseRealization z = sampler.sample(sample_seed(cfg, s));
      const Eigen::VectorXd c = ev.coefficients(z);
      const std::vector<double> ref = ev.field(c, basis->rank);
      const FemSolution u_ref = solve(ref);
      for (std::size_t l = 0; l < count; ++l) record(s, l, ref, u_ref, ev.field(c, out.orders[l]));
    });
  } else {
    require(p.kernel.alpha > p.kernel.d,
            "combined KL study requires alpha > d", ErrorCode::kDomain);
    const Box& D = p.domain;
    const double delta = D.d == 1 ? D.width(0) : std::hypot(D.width(0), D.width(1));
    const double mt = cfg.kl_mtilde_ratio * p.kernel.m;
    std::vector<KlLevel> levels(count);
    double widest = 0.0;
    for (std::size_t l = 0; l < count; ++l) {
      const int N = out.orders[l];
      const double dn = 0.5 * (delta + 1.0) +
                        2.0 / mt * (p.kernel.alpha / p.kernel.d - 1.0) * std::log(N);
      levels[l].grid = centered_grid(p, {dn, dn});
      levels[l].basis = kl_basis(p, levels[l].grid, N);
      levels[l].order = N;
      levels[l].evaluator =
          std::make_unique<TruncatedFieldEvaluator>(levels[l].basis, levels[l].grid, eval, N);
      out.kappa.push_back(remainder_bounds(*levels[l].basis, {N}, D).front());
      out.box_volume.push_back(levels[l].grid.box.volume());
      widest = std::max(widest, D.distance_to_complement(levels[l].grid.box));
    }
    out.rank = levels.back().basis->rank;
    const CellGrid ref_grid = p.noise_grid(std::max(widest, p.resolved_padding()));
    const NoiseSampler sampler(p.triplet, ref_grid, p.noise);
    SmoothingOptions so;
    so.require_padding = false;
    const FieldSmoother ref_smoother(p.kernel, ref_grid, eval, so);
    parallel_for(n, cfg.workers, [&](std::size_t s) {
      const NoiseRealization z = sampler.sample(sample_seed(cfg, s));
      const FieldRealization ref = ref_smoother.smooth(z);
      const FemSolution u_ref = solve(ref.values);
      for (std::size_t l = 0; l < count; ++l) {
        const NoiseRealization zl = restrict_noise(z, levels[l].grid.box);
        const auto& ev = *levels[l].evaluator;
        record(s, l, ref.values, u_ref, ev.field(ev.coefficients(zl), levels[l].order));
      }
    });
  }

  out.mean_solution_errors = column_means(out.solution_errors, count);
  out.mean_field_errors = column_means(out.field_errors, count);
  for (std::size_t l = 0; l < count; ++l) {
    const auto sol = column(out.solution_errors, l);
    const auto sens = column(out.sensitivity, l);
    out.correlation.push_back(correlation(sens, sol));
    out.flux_correlation.push_back(correlation(column(out.flux_sensitivity, l), sol));
    double ratio = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (sens[s] > 0.0) ratio = std::max(ratio, sol[s] / sens[s]);
    }
    out.sensitivity_ratio.push_back(ratio);
  }
  std::vector<double> x(out.orders.begin(), out.orders.end());
  out.fit = fit_rate(x, out.mean_solution_errors, true);
  out.field_fit = fit_rate(x, out.mean_field_errors, true);
  std::vector<double> scaled(count);
  for (std::size_t l = 0; l < count; ++l) scaled[l] = out.box_volume[l] * out.kappa[l];
  out.kappa_fit = fit_rate(x, scaled, true);
  return out;
}

}  // namespace levyfield
