// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/app.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"
#include "levyfield/error.hpp"
#include "levyfield/io.hpp"
#include "parallel.hpp"

namespace levyfield {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Output directory plus the list of files written into it.
class Artifacts {
 public:
  explicit Artifacts(std::string dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    write_file_atomic((std::filesystem::path(dir_) / name).string(), content);
    files_.push_back(name);
  }
  void csv(const std::string& name, const CsvTable& t) { write(name, t.str()); }

  const std::string& dir() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::string dir_;
  std::vector<std::string> files_;
};

struct Context {
  const RunConfig& cfg;
  Artifacts& art;
  std::ostream& out;
  std::string& stage;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

/// Line plot in 1D, heatmap on the vertex lattice in 2D.
std::string field_svg(const std::vector<std::array<double, 2>>& nodes,
                      const std::vector<double>& values, const Box& D,
                      std::array<int, 2> intervals, const std::string& title) {
  PlotOptions o;
  o.title = title;
  o.x_label = "x";
  if (D.d == 1) {
    PlotSeries s{title, {}, {}, false};
    for (std::size_t i = 0; i < values.size(); ++i) {
      s.x.push_back(nodes[i][0]);
      s.y.push_back(values[i]);
    }
    o.y_label = "value";
    return svg_plot({s}, o);
  }
  const std::size_t lattice = static_cast<std::size_t>(intervals[0] + 1) * (intervals[1] + 1);
  std::vector<double> v(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lattice));
  return svg_heatmap(v, intervals[0], intervals[1], o);
}

// ---------------------------------------------------------------------------
// sample

struct NamedTriplet {
  std::string name;
  LevyTriplet triplet;
};

std::vector<NamedTriplet> matched_triplets(const SampleSettings& s) {
  const double jump = s.poisson_jump;
  const double w = s.bigamma_decay;
  return {
      {"gaussian", {0.0, s.variance, JumpMeasure::null()}},
      {"poisson", {0.0, 0.0, JumpMeasure::discrete({{jump, s.variance / (jump * jump)}})}},
      // b_2 = 2 v / w^2 for the bigamma measure.
      {"bigamma", {0.0, 0.0, JumpMeasure::bigamma(0.5 * s.variance * w * w, w)}},
  };
}

struct LagCovariance {
  std::vector<double> cov;
  std::vector<double> se;
};

/// Cov(Z_k(x0), Z_k(x0 + r e_1)) with x0 the lower-left corner of D (centered
/// in y for d = 2).
LagCovariance lag_covariance(const ProblemSpec& p, const LevyTriplet& triplet,
                             const std::vector<double>& lags, std::size_t n,
                             std::uint64_t seed, int workers) {
  const Box& D = p.domain;
  std::vector<std::array<double, 2>> nodes;
  const double y = D.d == 2 ? 0.5 * (D.lower[1] + D.upper[1]) : 0.0;
  for (double r : lags) nodes.push_back({std::min(D.lower[0] + r, D.upper[0]), y});
  const EvalGrid eval = EvalGrid::from_nodes(D, nodes);
  const CellGrid grid = p.noise_grid(p.resolved_padding());
  const NoiseSampler sampler(triplet, grid, p.noise);
  SmoothingOptions so;
  so.require_padding = p.padding == 0.0;
  const FieldSmoother smoother(p.kernel, grid, eval, so);
  std::vector<std::vector<double>> values(n);
  parallel_for(n, workers, [&](std::size_t i) {
    values[i] = smoother.smooth(sampler.sample(derive_seed(seed, i))).values;
  });
  const std::size_t L = lags.size();
  std::vector<double> mean(L, 0.0);
  for (const auto& v : values) {
    for (std::size_t l = 0; l < L; ++l) mean[l] += v[l] / n;
  }
  LagCovariance out;
  for (std::size_t l = 0; l < L; ++l) {
    std::vector<double> prod(n);
    for (std::size_t i = 0; i < n; ++i) {
      prod[i] = (values[i][0] - mean[0]) * (values[i][l] - mean[l]);
    }
    const Summary s = summarize(prod);
    out.cov.push_back(s.mean * n / (n - 1.0));
    out.se.push_back(s.std_error());
  }
  return out;
}

int cmd_sample(Context& c) {
  const StudyConfig& st = c.cfg.study;
  const SampleSettings& ss = c.cfg.sample;
  ProblemSpec p = st.problem;
  const auto triplets = matched_triplets(ss);
  const EvalGrid eval = EvalGrid::lattice(p.domain, ss.snapshot_intervals);

  c.stage = "sample snapshots";
  for (const auto& t : triplets) {
    p.triplet = t.triplet;
    const CellGrid grid = p.noise_grid(p.resolved_padding());
    const NoiseSampler sampler(t.triplet, grid, p.noise);
    SmoothingOptions so;
    so.require_padding = p.padding == 0.0;
    const FieldSmoother smoother(p.kernel, grid, eval, so);
    const FieldRealization fr = smoother.smooth(sampler.sample(sample_seed(st, 0)));
    c.art.csv("field_" + t.name + ".csv", field_table(fr));
    c.art.write("field_" + t.name + ".svg",
                field_svg(eval.nodes, fr.values, p.domain, ss.snapshot_intervals,
                          t.name + " noise, matched covariance"));
    c.out << t.name << ": " << sampler.expected_atoms() << " expected atoms\n";
  }

  c.stage = "sample covariance";
  CsvTable cov({"noise", "lag", "covariance", "std_error", "reference"});
  std::vector<LagCovariance> est;
  for (const auto& t : triplets) {
    p.triplet = t.triplet;
    est.push_back(lag_covariance(p, t.triplet, ss.lags, ss.covariance_samples,
                                 derive_seed(st.seed, 0x434f56), st.workers));
    for (std::size_t l = 0; l < ss.lags.size(); ++l) {
      cov.row().add(t.name).add(ss.lags[l]).add(est.back().cov[l]).add(est.back().se[l])
          .add(covariance(p.kernel, ss.variance, ss.lags[l]));
    }
  }
  c.art.csv("lag_covariance.csv", cov);

  CsvTable match({"pair", "lag", "difference", "std_error", "within_3se"});
  int mismatches = 0;
  for (std::size_t a = 0; a < triplets.size(); ++a) {
    for (std::size_t b = a + 1; b < triplets.size(); ++b) {
      for (std::size_t l = 0; l < ss.lags.size(); ++l) {
        const double diff = est[a].cov[l] - est[b].cov[l];
        const double se = std::hypot(est[a].se[l], est[b].se[l]);
        const bool ok = std::abs(diff) <= 3.0 * se;
        mismatches += !ok;
        match.row().add(triplets[a].name + "-" + triplets[b].name).add(ss.lags[l]).add(diff)
            .add(se).add(ok ? 1 : 0);
      }
    }
  }
  c.art.csv("covariance_match.csv", match);
  c.out << "lag covariances: " << mismatches << " pair/lag comparisons outside 3 standard errors\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// mercer

int cmd_mercer(Context& c) {
  const StudyConfig& st = c.cfg.study;
  const MercerSettings& ms = c.cfg.mercer;
  const ProblemSpec& p = st.problem;
  c.stage = "mercer eigensolve";
  const Box box = p.domain.padded(ms.padding);
  std::array<int, 2> nodes = ms.nodes;
  if (p.domain.d == 1) nodes[1] = 1;
  const auto basis = std::make_shared<const MercerBasis>(nystrom_eig(p.kernel, box, nodes));
  c.art.csv("spectrum.csv", spectrum_table(*basis));

  c.stage = "mercer decay report";
  const int j_hi = std::min(ms.j_hi, basis->rank);
  const DecayReport rep = eig_decay_report(*basis, ms.j_lo, j_hi);
  c.art.csv("decay.csv", decay_table(rep));

  std::vector<int> orders;
  for (int o : st.truncation_orders) {
    if (o < basis->rank) orders.push_back(o);
  }
  CsvTable rem({"order", "kappa"});
  if (!orders.empty()) {
    const auto kappa = remainder_bounds(*basis, orders, p.domain);
    for (std::size_t i = 0; i < orders.size(); ++i) rem.row().add(orders[i]).add(kappa[i]);
  }
  c.art.csv("remainder.csv", rem);

  PlotSeries s{"eigenvalues", {}, {}, true};
  for (int j = 0; j < basis->rank; ++j) {
    s.x.push_back(j + 1.0);
    s.y.push_back(basis->eigenvalues[j]);
  }
  PlotOptions o;
  o.title = "Nystrom spectrum";
  o.x_label = "j";
  o.y_label = "lambda_j";
  o.log_x = o.log_y = true;
  c.art.write("spectrum.svg", svg_plot({s}, o));
  c.out << "rank " << basis->rank << ", slope " << fmt(rep.slope) << " over j in [" << rep.j_lo
        << ", " << rep.j_hi << "], R^2 " << fmt(rep.r2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// solve

int cmd_solve(Context& c) {
  const StudyConfig& st = c.cfg.study;
  c.stage = "solve setup";
  const SolutionPipeline pipe(st.problem);
  c.stage = "solve";
  const auto s = pipe.run(sample_seed(st, 0));
  c.art.csv("solution.csv", solution_table(s.solution, s.field.values, s.coefficient.values));
  const Mesh& m = *pipe.mesh();
  c.art.write("field.svg", field_svg(m.vertices, s.field.values, m.box, m.intervals,
                                     "smoothed field"));
  c.art.write("solution.svg", field_svg(m.vertices, s.solution.values, m.box, m.intervals,
                                        "solution u"));
  CsvTable sum({"h1_norm", "l2_norm", "residual", "pivot_ratio", "coefficient_min",
                "coefficient_max", "galerkin_residual"});
  sum.row().add(s.solution.h1).add(s.solution.l2).add(s.solution.residual)
      .add(s.solution.pivot_ratio).add(s.coefficient.min).add(s.coefficient.max)
      .add(galerkin_residual(s.solution, s.coefficient.values, pipe.data()));
  c.art.csv("solve_summary.csv", sum);
  c.out << "||u||_H1 = " << fmt(s.solution.h1) << ", coefficient in [" << fmt(s.coefficient.min)
        << ", " << fmt(s.coefficient.max) << "]\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// studies

int cmd_moments(Context& c) {
  c.stage = "moment study";
  const MomentStudyResult r = mc_solution_moments(c.cfg.study);
  c.art.csv("moments.csv", moments_table(r));
  c.art.csv("moment_norms.csv", moment_norms_table(r));
  CsvTable fails({"seed", "message"});
  for (const auto& f : r.failures) fails.row().add(std::to_string(f.seed)).add(f.message);
  c.art.csv("moment_failures.csv", fails);
  PlotSeries mean{"Monte Carlo mean", {}, {}, true}, bound{"series bound", {}, {}, true};
  for (const auto& e : r.estimates) {
    mean.x.push_back(e.order);
    mean.y.push_back(e.mean);
    if (std::isfinite(e.bound)) {
      bound.x.push_back(e.order);
      bound.y.push_back(e.bound);
    }
  }
  PlotOptions o;
  o.title = "moments of ||u||_H1";
  o.x_label = "order n";
  o.y_label = "E ||u||^n";
  o.log_y = true;
  c.art.write("moments.svg", svg_plot({mean, bound}, o));
  for (const auto& e : r.estimates) {
    c.out << "n=" << e.order << ": mean " << fmt(e.mean) << " [" << fmt(e.ci.low) << ", "
          << fmt(e.ci.high) << "], bound " << fmt(e.bound) << "\n";
  }
  return kExitOk;
}

int cmd_tails(Context& c) {
  c.stage = "tail study";
  const TailStudyResult r = tail_study(c.cfg.study);
  c.art.csv("tails.csv", tails_table(r));
  CsvTable p({"calibrated_k", "sigma_bar", "A", "v", "eta", "kappa1", "kappa_inf"});
  p.row().add(r.calibrated_k).add(r.talagrand.sigma_bar).add(r.talagrand.A).add(r.talagrand.v)
      .add(r.talagrand.eta).add(r.envelope.kappa1).add(r.envelope.kappa_inf);
  c.art.csv("tail_parameters.csv", p);
  PlotSeries emp{"empirical", {}, {}, true}, uni{"bound", {}, {}, false};
  for (const auto& row : r.rows) {
    emp.x.push_back(row.threshold);
    emp.y.push_back(row.empirical);
    uni.x.push_back(row.threshold);
    uni.y.push_back(row.union_bound);
  }
  PlotOptions o;
  o.title = "P(sup |Z_k| >= j)";
  o.x_label = "j";
  o.y_label = "probability";
  o.log_y = true;
  c.art.write("tails.svg", svg_plot({emp, uni}, o));
  c.out << "calibrated Talagrand K = " << fmt(r.calibrated_k) << "\n";
  return kExitOk;
}

int cmd_cutoff(Context& c) {
  c.stage = "cut-off study";
  const CutoffStudyResult r = cutoff_rate_study(c.cfg.study);
  c.art.csv("cutoff.csv", cutoff_table(r));
  c.art.csv("cutoff_samples.csv", cutoff_samples_table(r));
  std::vector<NamedFit> fits{{"field", r.field_fit}};
  if (c.cfg.study.solution_level) fits.push_back({"solution", r.solution_fit});
  c.art.csv("cutoff_fit.csv", fits_table(fits));
  PlotOptions o;
  o.title = "cut-off error";
  o.x_label = "distance from D to the box complement";
  o.y_label = "mean sup field error";
  c.art.write("cutoff.svg", svg_rate_plot(r.field_fit, o));
  c.out << "field slope " << fmt(r.field_fit.slope) << " (R^2 " << fmt(r.field_fit.r2) << ")";
  if (c.cfg.study.solution_level) {
    c.out << ", solution slope " << fmt(r.solution_fit.slope) << " (R^2 "
          << fmt(r.solution_fit.r2) << ")";
  }
  c.out << "\n";
  return kExitOk;
}

int cmd_kl(Context& c) {
  c.stage = "truncation study";
  const KlStudyResult r = kl_rate_study(c.cfg.study);
  c.art.csv("kl.csv", kl_table(r));
  c.art.csv("kl_samples.csv", kl_samples_table(r));
  c.art.csv("kl_fit.csv", fits_table({{"solution", r.fit},
                                      {"field", r.field_fit},
                                      {"volume_kappa", r.kappa_fit}}));
  PlotOptions o;
  o.title = "truncation error";
  o.x_label = "N'";
  o.y_label = "mean H1 solution error";
  c.art.write("kl.svg", svg_rate_plot(r.fit, o));
  c.out << "solution slope " << fmt(r.fit.slope) << " (R^2 " << fmt(r.fit.r2) << "), rank "
        << r.rank << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// validate

struct CheckRow {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
  std::string note;
};

int cmd_validate(Context& c) {
  const StudyConfig& st = c.cfg.study;
  const ProblemSpec& p = st.problem;
  const std::size_t n = c.cfg.validate.samples;
  std::vector<CheckRow> rows;
  auto guarded = [&](const std::string& name, const std::function<CheckRow()>& f) {
    c.stage = "validate: " + name;
    try {
      CheckRow r = f();
      r.name = name;
      rows.push_back(r);
    } catch (const std::exception& e) {
      rows.push_back({name, std::nan(""), std::nan(""), false, e.what()});
    }
  };

  guarded("noise reproducibility", [&] {
    const CellGrid grid = p.noise_grid(p.resolved_padding());
    const NoiseSampler sampler(p.triplet, grid, p.noise);
    const auto a = sampler.sample(st.seed), b = sampler.sample(st.seed);
    bool same = a.gaussian_cells == b.gaussian_cells && a.atoms.size() == b.atoms.size() &&
                a.drift == b.drift;
    for (std::size_t i = 0; same && i < a.atoms.size(); ++i) {
      same = a.atoms[i].x == b.atoms[i].x && a.atoms[i].s == b.atoms[i].s;
    }
    return CheckRow{"", same ? 0.0 : 1.0, 0.0, same, "identical seeds, identical noise"};
  });

  guarded("characteristic functional", [&] {
    const CellGrid grid = p.noise_grid(0.0);
    const auto f = grid.indicator(p.domain);
    const auto est = empirical_char_functional(p.triplet, grid, f, {0.25, 0.5, 1.0}, n,
                                               derive_seed(st.seed, 1), p.noise, st.workers);
    double worst = 0.0;
    for (const auto& e : est) worst = std::max(worst, e.error());
    const double limit = 4.0 / std::sqrt(static_cast<double>(n));
    return CheckRow{"", worst, limit, worst <= limit, "max |empirical - reference| over t"};
  });

  // Mean and variance of Z_k at the node closest to the center of D.
  std::vector<double> center_values;
  guarded("smoothed field variance", [&] {
    const SolutionPipeline pipe(p);
    const auto& nodes = pipe.eval_grid().nodes;
    std::array<double, 2> mid{0.5 * (p.domain.lower[0] + p.domain.upper[0]),
                              0.5 * (p.domain.lower[1] + p.domain.upper[1])};
    std::size_t at = 0;
    double best = kInfinity;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double dist = std::hypot(nodes[i][0] - mid[0], nodes[i][1] - mid[1]);
      if (dist < best) {
        best = dist;
        at = i;
      }
    }
    center_values.assign(n, 0.0);
    parallel_for(n, st.workers, [&](std::size_t i) {
      const auto z = pipe.sampler().sample(derive_seed(st.seed ^ 0x56415249ULL, i));
      center_values[i] = pipe.smoother().smooth(z).values[at];
    });
    const Summary s = summarize(center_values);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
      sq[i] = (center_values[i] - s.mean) * (center_values[i] - s.mean);
    }
    const double se = summarize(sq).std_error();
    const double ref = smoothed_covariance(p.triplet, p.kernel, 0.0);
    const double limit = 4.0 * se;
    return CheckRow{"", std::abs(s.variance - ref), limit, std::abs(s.variance - ref) <= limit,
                    "|empirical - (sigma2 + b2) k_2alpha(0)| against 4 standard errors"};
  });

  guarded("smoothed field mean", [&] {
    require(!center_values.empty(), "no field samples");
    const Summary s = summarize(center_values);
    const double ref = cumulants(p.triplet, 1)[1] * matern_total_integral(p.kernel);
    const double limit = 4.0 * s.std_error() +
                         p.noise.drift_tolerance * matern_total_integral(p.kernel);
    return CheckRow{"", std::abs(s.mean - ref), limit, std::abs(s.mean - ref) <= limit,
                    "|empirical - c1 int k| against 4 standard errors plus the drift tolerance"};
  });

  guarded("jump domination", [&] {
    const SolutionPipeline pipe(p);
    double worst = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
      const auto z = pipe.sampler().sample(derive_seed(st.seed, 100 + i));
      worst = std::max(worst, domination_check(pipe.smoother(), z).worst_excess);
    }
    return CheckRow{"", worst, 1e-9, worst <= 1e-9, "|P_k| <= sum |S| |k| at every node"};
  });

  guarded("transform bounds", [&] {
    p.transform.verify();
    return CheckRow{"", 0.0, 0.0, true, p.transform.describe()};
  });

  guarded("fem residual", [&] {
    const SolutionPipeline pipe(p);
    const auto s = pipe.run(sample_seed(st, 0));
    const double g = galerkin_residual(s.solution, s.coefficient.values, pipe.data());
    return CheckRow{"", g, 1e-8, g <= 1e-8, "max Galerkin residual relative to the load"};
  });

  guarded("a priori estimate", [&] {
    const SolutionPipeline pipe(p);
    const bool homogeneous =
        p.dirichlet_value == 0.0 &&
        std::all_of(p.sides.begin(), p.sides.begin() + 2 * p.domain.d,
                    [](BoundaryKind k) { return k == BoundaryKind::kDirichlet; });
    double worst = 0.0;
    for (std::size_t i = 0; i < 50; ++i) {
      const auto s = pipe.run(sample_seed(st, i));
      worst = std::max(worst, apriori_ratio(s.solution, s.coefficient.values, pipe.data()));
    }
    if (homogeneous) {
      const double limit = dirichlet_apriori_constant(p.domain);
      return CheckRow{"", worst, limit, worst <= limit, "max ratio over 50 coefficients"};
    }
    return CheckRow{"", worst, kInfinity, std::isfinite(worst),
                    "max ratio over 50 coefficients (no closed-form constant)"};
  });

  guarded("mercer orthonormality", [&] {
    std::array<int, 2> nodes{p.domain.d == 1 ? 64 : 12, p.domain.d == 1 ? 1 : 12};
    const MercerBasis b = nystrom_eig(p.kernel, p.domain, nodes);
    const int count = std::min(b.rank, 16);
    const double dev = (b.gram(count) - Eigen::MatrixXd::Identity(count, count)).cwiseAbs().maxCoeff();
    bool descending = true;
    for (Eigen::Index j = 1; j < b.eigenvalues.size(); ++j) {
      descending = descending && b.eigenvalues[j] <= b.eigenvalues[j - 1] && b.eigenvalues[j] >= 0.0;
    }
    return CheckRow{"", dev, 1e-8, dev <= 1e-8 && descending,
                    "max |E^T W E - I|, nonnegative descending spectrum"};
  });

  guarded("moment series", [&] {
    const Mesh mesh = p.mesh();
    const FemData data = p.data(mesh);
    const double c_ap = st.c_apriori > 0.0 ? st.c_apriori : dirichlet_apriori_constant(p.domain);
    const SupTailBound tail(p.triplet, p.kernel, p.domain);
    try {
      const SeriesBound b =
          moment_series_bound(p.transform, st.moment_orders.front(), tail, data_norm(mesh, data), c_ap);
      return CheckRow{"", b.value, kInfinity, b.value > 0.0, b.certificate};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDivergence) throw;
      return CheckRow{"", kInfinity, kInfinity, true, std::string("refused: ") + e.what()};
    }
  });

  guarded("study determinism", [&] {
    StudyConfig small = st;
    small.samples = 8;
    const std::string a = moments_table(mc_solution_moments(small)).str();
    small.workers = 1;
    const std::string b = moments_table(mc_solution_moments(small)).str();
    return CheckRow{"", a == b ? 0.0 : 1.0, 0.0, a == b, "moment CSV bytes, pooled vs serial"};
  });

  CsvTable t({"check", "value", "limit", "pass", "note"});
  int failed = 0;
  for (const auto& r : rows) {
    t.row().add(r.name).add(r.value).add(r.limit).add(r.pass ? 1 : 0).add(r.note);
    failed += !r.pass;
    c.out << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << fmt(r.value);
    if (std::isfinite(r.limit)) c.out << " (limit " << fmt(r.limit) << ")";
    if (!r.pass && !r.note.empty()) c.out << " - " << r.note;
    c.out << "\n";
  }
  c.stage = "validate report";
  c.art.csv("validate.csv", t);
  if (failed) {
    c.stage = "validate";
    fail(ErrorCode::kStudy, std::to_string(failed) + " invariant check(s) failed");
  }
  return kExitOk;
}

using Command = int (*)(Context&);

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> m{
      {"sample", cmd_sample},   {"mercer", cmd_mercer},    {"solve", cmd_solve},
      {"moments", cmd_moments}, {"tails", cmd_tails},      {"cutoff-rate", cmd_cutoff},
      {"kl-rate", cmd_kl},      {"validate", cmd_validate}};
  return m;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"sample",      "mercer",  "solve",
                                              "moments",     "tails",   "cutoff-rate",
                                              "kl-rate",     "validate"};
  return names;
}

std::string usage(const std::string& program) {
  std::ostringstream os;
  os << "usage: " << program
     << " <subcommand> <config.yaml> [--seed N] [--samples N] [--workers N] [--out DIR]\n"
     << "\nsubcommands:\n"
     << "  sample       field snapshots for Gaussian, Poisson and bigamma noise\n"
     << "  mercer       Nystrom spectrum and decay report\n"
     << "  solve        one realization of the random elliptic problem\n"
     << "  moments      Monte Carlo moments of ||u||_H1 with the series bound\n"
     << "  tails        supremum tail probabilities and bounds\n"
     << "  cutoff-rate  error of the noise cut-off against the box distance\n"
     << "  kl-rate      error of the truncated Mercer expansion against N'\n"
     << "  validate     invariant checks on the configured problem\n"
     << "\nexit status: 0 ok, 1 study failure, 2 configuration error\n"
     << "environment: LEVYFIELD_OUT overrides the output directory\n";
  return os.str();
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::kInternal, "SHA-256 computation failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return os.str();
}

std::string resolve_output_dir(const RunConfig& cfg, const RunOverrides& ov) {
  if (ov.out && !ov.out->empty()) return *ov.out;
  if (const char* env = std::getenv("LEVYFIELD_OUT"); env && *env) return env;
  return cfg.study.output_dir;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = "levyfield";
  j["version"] = version;
  j["subcommand"] = subcommand;
  j["config_path"] = config_path;
  j["config_sha256"] = config_sha256;
  j["seed"] = seed;
  j["samples"] = samples;
  j["workers"] = workers;
  j["started"] = started;
  j["finished"] = finished;
  j["status"] = status;
  if (!failed_stage.empty()) j["failed_stage"] = failed_stage;
  if (!error.empty()) j["error"] = error;
  j["files"] = files;
  return j.dump(2) + "\n";
}

int run(const std::string& subcommand, const std::string& config_path,
        const RunOverrides& ov, std::ostream& out, std::ostream& err) {
  const auto it = commands().find(subcommand);
  if (it == commands().end()) {
    err << "unknown subcommand '" << subcommand << "'\n" << usage();
    return kExitConfig;
  }
  RunManifest man;
  man.started = utc_now();
  man.subcommand = subcommand;
  man.config_path = config_path;
  man.version = LEVYFIELD_VERSION;

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
    if (ov.seed) cfg.study.seed = *ov.seed;
    if (ov.samples) cfg.study.samples = *ov.samples;
    if (ov.workers) cfg.study.workers = *ov.workers;
    validate_config(cfg);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  man.config_sha256 = sha256_hex(cfg.text);
  man.seed = cfg.study.seed;
  man.samples = cfg.study.samples;
  man.workers = cfg.study.workers;

  Artifacts art(resolve_output_dir(cfg, ov));
  std::string stage = "start";
  Context ctx{cfg, art, out, stage};
  int status = kExitOk;
  try {
    status = it->second(ctx);
    man.status = "ok";
  } catch (const std::exception& e) {
    status = kExitStudy;
    man.status = "failed";
    man.failed_stage = stage;
    man.error = e.what();
    err << "study failed during " << stage << ": " << e.what() << "\n";
  }
  man.files = art.files();
  man.finished = utc_now();
  try {
    write_file_atomic((std::filesystem::path(art.dir()) / "manifest.json").string(),
                      man.to_json());
  } catch (const std::exception& e) {
    err << "cannot write manifest: " << e.what() << "\n";
    return kExitStudy;
  }
  return status;
}

}  // namespace levyfield
