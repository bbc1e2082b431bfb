// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include "levyfield/error.hpp"
#include "levyfield/io.hpp"

namespace levyfield {

namespace {

struct Check {
  std::function<bool(double)> ok;
  std::string rule;
};

Check positive() { return {[](double v) { return v > 0.0; }, "must be > 0"}; }
Check nonnegative() { return {[](double v) { return v >= 0.0; }, "must be >= 0"}; }
Check finite() { return {[](double) { return true; }, "must be finite"}; }
Check between(double lo, double hi) {
  std::ostringstream os;
  os << "must lie in [" << lo << ", " << hi << "]";
  return {[lo, hi](double v) { return v >= lo && v <= hi; }, os.str()};
}
Check open_unit() { return {[](double v) { return v > 0.0 && v < 1.0; }, "must lie in (0, 1)"}; }
Check half_open_unit() {
  return {[](double v) { return v > 0.0 && v <= 1.0; }, "must lie in (0, 1]"};
}

/// One mapping of the document with its dotted path. Tracks the keys read so
/// that unknown keys can be reported.
class Section {
 public:
  Section(YAML::Node node, std::string path, const std::string& origin)
      : node_(std::move(node)), path_(std::move(path)), origin_(origin) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      error(node_, "", "expected a mapping");
    }
  }

  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }

  YAML::Node get(const std::string& key) {
    used_.insert(key);
    if (!node_ || !node_.IsMap()) return YAML::Node();
    const YAML::Node& map = node_;  // const lookup never inserts
    return map[key];
  }

  Section section(const std::string& key) { return Section(get(key), name(key), origin_); }

  double number(const std::string& key, double def, const Check& check) {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return def;
    return checked(n, key, scalar<double>(n, key), check);
  }

  long long integer(const std::string& key, long long def, long long lo, long long hi) {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return def;
    const long long v = scalar<long long>(n, key);
    if (v < lo || v > hi) {
      std::ostringstream os;
      os << "must lie in [" << lo << ", " << hi << "] (got " << v << ")";
      error(n, key, os.str());
    }
    return v;
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t def) {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return def;
    return scalar<std::uint64_t>(n, key);
  }

  bool boolean(const std::string& key, bool def) {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return def;
    return scalar<bool>(n, key);
  }

  std::string text(const std::string& key, const std::string& def) {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return def;
    return scalar<std::string>(n, key);
  }

  std::string choice(const std::string& key, const std::string& def,
                     const std::vector<std::string>& allowed) {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return def;
    const std::string v = scalar<std::string>(n, key);
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      error(n, key, "unknown value '" + v + "' (expected one of " + list + ")");
    }
    return v;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> def,
                              const Check& check, bool sorted) {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return def;
    if (!n.IsSequence() || n.size() == 0) error(n, key, "expected a nonempty list");
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i) {
      const std::string k = key + "[" + std::to_string(i) + "]";
      out.push_back(checked(n[i], k, scalar<double>(n[i], k), check));
    }
    if (sorted && !std::is_sorted(out.begin(), out.end())) {
      error(n, key, "list must be sorted in increasing order");
    }
    return out;
  }

  std::vector<int> integers(const std::string& key, std::vector<int> def, long long lo,
                            long long hi, bool sorted) {
    const YAML::Node n = get(key);
    if (!n || n.IsNull()) return def;
    if (!n.IsSequence() || n.size() == 0) error(n, key, "expected a nonempty list");
    std::vector<int> out;
    for (std::size_t i = 0; i < n.size(); ++i) {
      const std::string k = key + "[" + std::to_string(i) + "]";
      const long long v = scalar<long long>(n[i], k);
      if (v < lo || v > hi) {
        std::ostringstream os;
        os << "must lie in [" << lo << ", " << hi << "] (got " << v << ")";
        error(n[i], k, os.str());
      }
      out.push_back(static_cast<int>(v));
    }
    if (sorted && !std::is_sorted(out.begin(), out.end())) {
      error(n, key, "list must be sorted in increasing order");
    }
    return out;
  }

  /// Reports keys that were never read.
  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!used_.count(key)) error(kv.first, key, "unknown key");
    }
  }

  [[noreturn]] void error(const YAML::Node& n, const std::string& key,
                          const std::string& what) const {
    std::ostringstream os;
    os << origin_;
    YAML::Mark mark = YAML::Mark::null_mark();
    if (n) {
      mark = n.Mark();
    } else if (node_) {
      mark = node_.Mark();
    }
    if (!mark.is_null()) os << ':' << mark.line + 1 << ':' << mark.column + 1;
    os << ": " << name(key) << ": " << what;
    fail(ErrorCode::kConfig, os.str());
  }

  std::string name(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  template <typename T>
  T scalar(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) error(n, key, "expected a scalar");
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      error(n, key, "cannot convert '" + n.Scalar() + "'");
    }
  }

  double checked(const YAML::Node& n, const std::string& key, double v, const Check& c) const {
    if (!std::isfinite(v) || !c.ok(v)) {
      std::ostringstream os;
      os << c.rule << " (got " << n.Scalar() << ")";
      error(n, key, os.str());
    }
    return v;
  }

  YAML::Node node_;
  std::string path_;
  const std::string& origin_;
  std::set<std::string> used_;
};

JumpMeasure parse_jumps(Section s) {
  const std::string kind = s.choice("kind", "none", {"none", "discrete", "gamma", "bigamma"});
  JumpMeasure nu = JumpMeasure::null();
  if (kind == "discrete") {
    const YAML::Node atoms = s.get("atoms");
    if (!atoms || !atoms.IsSequence() || atoms.size() == 0) {
      s.error(atoms, "atoms", "discrete measures need a nonempty list of [location, mass]");
    }
    std::vector<DiscreteAtom> list;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string key = "atoms[" + std::to_string(i) + "]";
      const YAML::Node a = atoms[i];
      if (!a.IsSequence() || a.size() != 2) s.error(a, key, "expected [location, mass]");
      double loc = 0.0, mass = 0.0;
      try {
        loc = a[0].as<double>();
        mass = a[1].as<double>();
      } catch (const YAML::Exception&) {
        s.error(a, key, "expected two numbers");
      }
      if (!std::isfinite(loc) || loc == 0.0) s.error(a[0], key, "location must be finite and nonzero");
      if (!std::isfinite(mass) || mass <= 0.0) s.error(a[1], key, "mass must be > 0");
      list.push_back({loc, mass});
    }
    nu = JumpMeasure::discrete(std::move(list));
  } else if (kind == "gamma" || kind == "bigamma") {
    if (!s.has("intensity") || !s.has("decay")) {
      s.error(s.get("kind"), "kind", kind + " measures need intensity and decay");
    }
    const double v = s.number("intensity", 0.0, positive());
    const double w = s.number("decay", 0.0, positive());
    nu = kind == "gamma" ? JumpMeasure::gamma(v, w) : JumpMeasure::bigamma(v, w);
  }
  if (kind != "discrete") s.get("atoms");
  if (kind != "gamma" && kind != "bigamma") {
    s.get("intensity");
    s.get("decay");
  }
  s.finish();
  return nu;
}

std::array<double, 2> point(Section& s, const std::string& key, int& d,
                            std::array<double, 2> def) {
  const YAML::Node n = s.get(key);
  if (!n || n.IsNull()) return def;
  if (!n.IsSequence() || n.size() < 1 || n.size() > 2) {
    s.error(n, key, "expected a list of 1 or 2 coordinates");
  }
  const int nd = static_cast<int>(n.size());
  if (d != 0 && nd != d) s.error(n, key, "dimension differs from the other corner");
  d = nd;
  std::array<double, 2> out{0.0, 0.0};
  for (int i = 0; i < nd; ++i) {
    try {
      out[i] = n[i].as<double>();
    } catch (const YAML::Exception&) {
      s.error(n[i], key, "expected a number");
    }
    if (!std::isfinite(out[i])) s.error(n[i], key, "coordinates must be finite");
  }
  return out;
}

BoundaryKind side(Section& s, const std::string& key) {
  return s.choice(key, "dirichlet", {"dirichlet", "neumann"}) == "dirichlet"
             ? BoundaryKind::kDirichlet
             : BoundaryKind::kNeumann;
}

std::array<int, 2> per_axis(Section& s, const std::string& key, std::array<int, 2> def, int d,
                            long long lo, long long hi) {
  if (!s.has(key)) return def;
  const YAML::Node n = s.get(key);
  std::vector<int> v;
  if (n.IsScalar()) {
    v.assign(d, static_cast<int>(s.integer(key, 0, lo, hi)));
  } else {
    v = s.integers(key, {}, lo, hi, false);
    if (static_cast<int>(v.size()) != d) {
      s.error(n, key, "expected " + std::to_string(d) + " entries (one per axis)");
    }
  }
  std::array<int, 2> out{v[0], d == 2 ? v[1] : 0};
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << origin << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
    fail(ErrorCode::kConfig, os.str());
  }
  if (!root || root.IsNull()) fail(ErrorCode::kConfig, origin + ": empty configuration");

  RunConfig cfg;
  cfg.origin = origin;
  cfg.text = text;
  StudyConfig& st = cfg.study;
  ProblemSpec& p = st.problem;

  Section top(root, "", cfg.origin);
  st.seed = top.unsigned_integer("seed", st.seed);
  st.samples = static_cast<std::size_t>(top.integer("samples", 200, 2, 100'000'000));
  const long long workers = top.integer("workers", 0, 0, 4096);
  st.workers = workers > 0 ? static_cast<int>(workers)
                           : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  st.output_dir = top.text("output_dir", st.output_dir);

  {
    Section s = top.section("domain");
    int d = 0;
    const auto lo = point(s, "lower", d, {0.0, 0.0});
    const auto hi = point(s, "upper", d, {1.0, 0.0});
    if (d == 0) d = 1;
    for (int a = 0; a < d; ++a) {
      if (!(hi[a] > lo[a])) s.error(s.get("upper"), "upper", "upper corner must exceed lower");
    }
    p.domain = d == 1 ? Box::interval(lo[0], hi[0]) : Box::rectangle(lo[0], hi[0], lo[1], hi[1]);
    s.finish();
  }
  const int d = p.domain.d;

  {
    Section s = top.section("triplet");
    p.triplet.drift = s.number("drift", 0.0, finite());
    p.triplet.sigma2 = s.number("sigma2", 1.0, nonnegative());
    p.triplet.nu = parse_jumps(s.section("jumps"));
    s.finish();
  }
  {
    Section s = top.section("kernel");
    p.kernel.d = d;
    std::ostringstream rule;
    rule << "must exceed d/2 = " << 0.5 * d << " and be <= 25";
    p.kernel.alpha = s.number(
        "alpha", 1.0, Check{[d](double v) { return 2.0 * v > d && v <= 25.0; }, rule.str()});
    p.kernel.m = s.number("m", 1.0, between(1e-3, 1e3));
    s.finish();
  }
  {
    Section s = top.section("transform");
    const std::string kind =
        s.choice("kind", "exp", {"exp", "smoothed_step", "tempered_exp"});
    if (kind == "smoothed_step") {
      const double lo = s.number("low", 0.5, positive());
      const double hi = s.number("high", 2.0, positive());
      if (!(hi > lo)) s.error(s.get("high"), "high", "must exceed transform.low");
      p.transform = TransformSpec::smoothed_step(lo, hi, s.number("width", 1.0, positive()));
    } else if (kind == "tempered_exp") {
      const double h = s.number("h", 0.5, half_open_unit());
      p.transform = TransformSpec::tempered_exp(h, s.number("rho", 1.0, positive()));
    }
    for (const char* k : {"low", "high", "width", "h", "rho"}) s.get(k);
    s.finish();
  }
  {
    Section s = top.section("mesh");
    p.mesh_intervals = per_axis(s, "intervals", {32, d == 2 ? 32 : 0}, d, 1, 4096);
    if (d == 1) p.mesh_intervals[1] = 1;
    s.finish();
  }
  {
    Section s = top.section("boundary");
    p.sides = {side(s, "x0"), side(s, "x1"), side(s, "y0"), side(s, "y1")};
    s.finish();
  }
  {
    Section s = top.section("data");
    p.source = s.number("source", 1.0, finite());
    p.dirichlet_value = s.number("dirichlet", 0.0, finite());
    p.neumann_value = s.number("neumann", 0.0, finite());
    s.finish();
  }
  {
    Section s = top.section("noise");
    p.noise_refine = static_cast<int>(s.integer("refine", 1, 1, 64));
    p.padding = s.number("padding", 0.0, nonnegative());
    p.noise.drift_tolerance = s.number("drift_tolerance", 1e-3, open_unit());
    s.finish();
  }
  {
    Section s = top.section("moments");
    st.moment_orders = s.integers("orders", st.moment_orders, 1, 16, true);
    st.c_apriori = s.number("c_apriori", 0.0, nonnegative());
    s.finish();
  }
  {
    Section s = top.section("tails");
    st.tail_thresholds = s.numbers("thresholds", st.tail_thresholds, nonnegative(), true);
    st.talagrand_k = s.number("talagrand_k", 0.0, nonnegative());
    st.holder_eta = s.number("holder_eta", 0.5, half_open_unit());
    s.finish();
  }
  {
    Section s = top.section("cutoff");
    st.cutoff_paddings = s.numbers("paddings", st.cutoff_paddings, positive(), true);
    st.reference_padding = s.number("reference_padding", 0.0, nonnegative());
    st.solution_level = s.boolean("solution_level", true);
    s.finish();
  }
  {
    Section s = top.section("kl");
    st.truncation_orders = s.integers("orders", st.truncation_orders, 1, 5000, true);
    st.kl_padding = s.number("padding", st.kl_padding, positive());
    st.kl_combined = s.boolean("combined", false);
    st.kl_mtilde_ratio = s.number("mtilde_ratio", st.kl_mtilde_ratio, open_unit());
    s.finish();
  }
  {
    Section s = top.section("sample");
    SampleSettings& ss = cfg.sample;
    ss.variance = s.number("variance", ss.variance, positive());
    ss.poisson_jump = s.number(
        "poisson_jump", ss.poisson_jump,
        Check{[](double v) { return v != 0.0; }, "must be finite and nonzero"});
    ss.bigamma_decay = s.number("bigamma_decay", ss.bigamma_decay, positive());
    ss.snapshot_intervals = per_axis(s, "intervals", {128, d == 2 ? 64 : 0}, d, 2, 2048);
    if (d == 1) ss.snapshot_intervals[1] = 0;
    ss.covariance_samples =
        static_cast<std::size_t>(s.integer("covariance_samples", 2000, 2, 10'000'000));
    ss.lags = s.numbers("lags", ss.lags, nonnegative(), true);
    s.finish();
  }
  {
    Section s = top.section("mercer");
    MercerSettings& ms = cfg.mercer;
    ms.nodes = per_axis(s, "nodes", {200, d == 2 ? 40 : 0}, d, 4, 4000);
    if (d == 1) ms.nodes[1] = 0;
    ms.padding = s.number("padding", ms.padding, nonnegative());
    ms.j_lo = static_cast<int>(s.integer("j_lo", ms.j_lo, 1, 100000));
    ms.j_hi = static_cast<int>(s.integer("j_hi", ms.j_hi, 2, 100000));
    s.finish();
  }
  {
    Section s = top.section("validate");
    cfg.validate.samples =
        static_cast<std::size_t>(s.integer("samples", 2000, 100, 10'000'000));
    s.finish();
  }
  top.finish();
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    fail(ErrorCode::kConfig, e.what());
  }
  return parse_config(text, path);
}

void validate_config(const RunConfig& cfg) {
  const std::string& o = cfg.origin;
  try {
    cfg.study.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kConfig, o + ": " + e.what());
  }
  const Box& D = cfg.study.problem.domain;
  if (cfg.sample.lags.back() > D.width(0)) {
    std::ostringstream os;
    os << o << ": sample.lags: largest lag " << cfg.sample.lags.back()
       << " exceeds the domain width " << D.width(0) << " along x";
    fail(ErrorCode::kConfig, os.str());
  }
  if (cfg.mercer.j_hi <= cfg.mercer.j_lo) {
    fail(ErrorCode::kConfig, o + ": mercer: j_hi must exceed j_lo");
  }
  long long nodes = cfg.mercer.nodes[0];
  if (D.d == 2) nodes *= cfg.mercer.nodes[1];
  if (nodes > 8000) {
    fail(ErrorCode::kConfig, o + ": mercer.nodes: at most 8000 nodes in total (dense eigensolver)");
  }
  if (cfg.mercer.j_hi > nodes) {
    fail(ErrorCode::kConfig, o + ": mercer.j_hi exceeds the number of Nystrom nodes");
  }
}

}  // namespace levyfield
