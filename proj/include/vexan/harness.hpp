/**
 * @file harness.hpp
 * @brief Parameterised experiments that measure the constants of the
 *        inequalities implemented by the library, plus the suite runner and
 *        JSONL / CSV report writers.
 *
 * An experiment evaluates one quantity at every resolution of its spec. The
 * closed-form inputs are resampled on each grid, so "stable" compares the same
 * family at N and 2N.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vexan/commutators.hpp"
#include "vexan/discretize.hpp"
#include "vexan/exponent.hpp"
#include "vexan/families.hpp"
#include "vexan/maximal.hpp"
#include "vexan/norms.hpp"
#include "vexan/operators.hpp"

namespace vexan {

enum class ExperimentKind {
  holder_integral,
  holder_product,
  holder_orlicz,
  char_norm_equiv,
  weight_identity,
  kolmogorov,
  maximal_chain,
  expL_avg_bound,
  pointwise_sharp,
  sharp_norm_bound,
  thm31_domination,
  thm31_ratio,
  thm32_ratio,
  frac_bound,
  maximal_bound_trend,
};

inline const std::vector<ExperimentKind>& all_experiment_kinds() {
  static const std::vector<ExperimentKind> kinds{
      ExperimentKind::holder_integral, ExperimentKind::holder_product,   ExperimentKind::holder_orlicz,
      ExperimentKind::char_norm_equiv, ExperimentKind::weight_identity,  ExperimentKind::kolmogorov,
      ExperimentKind::maximal_chain,   ExperimentKind::expL_avg_bound,   ExperimentKind::pointwise_sharp,
      ExperimentKind::sharp_norm_bound, ExperimentKind::thm31_domination, ExperimentKind::thm31_ratio,
      ExperimentKind::thm32_ratio,     ExperimentKind::frac_bound,       ExperimentKind::maximal_bound_trend};
  return kinds;
}

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::holder_integral: return "holder_integral";
    case ExperimentKind::holder_product: return "holder_product";
    case ExperimentKind::holder_orlicz: return "holder_orlicz";
    case ExperimentKind::char_norm_equiv: return "char_norm_equiv";
    case ExperimentKind::weight_identity: return "weight_identity";
    case ExperimentKind::kolmogorov: return "kolmogorov";
    case ExperimentKind::maximal_chain: return "maximal_chain";
    case ExperimentKind::expL_avg_bound: return "expL_avg_bound";
    case ExperimentKind::pointwise_sharp: return "pointwise_sharp";
    case ExperimentKind::sharp_norm_bound: return "sharp_norm_bound";
    case ExperimentKind::thm31_domination: return "thm31_domination";
    case ExperimentKind::thm31_ratio: return "thm31_ratio";
    case ExperimentKind::thm32_ratio: return "thm32_ratio";
    case ExperimentKind::frac_bound: return "frac_bound";
    case ExperimentKind::maximal_bound_trend: return "maximal_bound_trend";
  }
  return "?";
}

inline std::optional<ExperimentKind> parse_experiment_kind(const std::string& s) {
  for (auto k : all_experiment_kinds())
    if (s == to_string(k)) return k;
  return std::nullopt;
}

struct ExponentSpec {
  std::string kind;
  std::vector<double> params;

  ExponentField build(int dim) const { return ExponentField::from_params(kind, params, dim); }
};

struct KernelParams {
  int m = 2;
  double rho_cells = 2.0;  // ρ in units of the coarsest spacing
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::holder_integral;
  int dim = 1;
  double half_extent = 2.0;
  std::vector<int> resolutions{32, 64};
  std::vector<ExponentSpec> exponents;  // empty: per-kind defaults
  int cases = 10;
  std::uint64_t seed = 1;
  KernelParams kernel;
  std::vector<double> rho_sweep{4.0, 2.0};
  CubeFamily family = CubeFamily::all();
  std::string inputs = "mixed";  // or one input family: bump, cube_indicator, power, piecewise
  double beta = 1.25;
  double gamma = 0.2;
  double eta = 0.4;
  double delta = 0.5;
  double alpha = 0.5;
  double t = 1.0;
  double r = 2.0;
  double stability_tol = 0.10;
};

struct ResolutionPoint {
  int N;
  double value;
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::holder_integral;
  nlohmann::json params = nlohmann::json::object();
  double measured_constant = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> asserted_bound;
  bool pass = false;
  std::string status = "ok";
  nlohmann::json argmax = nlohmann::json::object();
  std::vector<ResolutionPoint> resolutions;
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;
  nlohmann::json kernel = nullptr;
  nlohmann::json details = nlohmann::json::object();
};

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const ExponentSpec& e) { return {{"kind", e.kind}, {"params", e.params}}; }

inline nlohmann::json to_json(const CubeFamily& f) {
  return {{"policy", f.policy == CubePolicy::dyadic ? "dyadic" : "all"}, {"max_side", f.max_side_cells}};
}

inline nlohmann::json to_json(const ExperimentSpec& s) {
  nlohmann::json ex = nlohmann::json::array();
  for (const auto& e : s.exponents) ex.push_back(to_json(e));
  return {{"kind", to_string(s.kind)},
          {"dim", s.dim},
          {"half_extent", s.half_extent},
          {"resolutions", s.resolutions},
          {"exponents", ex},
          {"cases", s.cases},
          {"seed", s.seed},
          {"kernel", {{"m", s.kernel.m}, {"rho_cells", s.kernel.rho_cells}}},
          {"rho_sweep", s.rho_sweep},
          {"family", to_json(s.family)},
          {"inputs", s.inputs},
          {"beta", s.beta},
          {"gamma", s.gamma},
          {"eta", s.eta},
          {"delta", s.delta},
          {"alpha", s.alpha},
          {"t", s.t},
          {"r", s.r},
          {"stability_tol", s.stability_tol}};
}

inline nlohmann::json to_json(const KernelSpec& k) {
  nlohmann::json j{{"kind", k.is_fractional() ? "fractional" : "mollified_cz"}, {"m", k.m}, {"n", k.n}};
  if (k.is_fractional())
    j["alpha"] = k.alpha();
  else
    j["rho"] = k.rho();
  return j;
}

inline nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json res = nlohmann::json::array();
  for (const auto& p : r.resolutions) res.push_back({{"N", p.N}, {"value", p.value}});
  return {{"kind", to_string(r.kind)},
          {"params", r.params},
          {"measured_constant", r.measured_constant},
          {"asserted_bound", r.asserted_bound ? nlohmann::json(*r.asserted_bound) : nlohmann::json(nullptr)},
          {"pass", r.pass},
          {"status", r.status},
          {"argmax", r.argmax},
          {"resolutions", res},
          {"runtime_ms", r.runtime_ms},
          {"seed", r.seed},
          {"kernel", r.kernel},
          {"details", r.details}};
}

// ---------------------------------------------------------------------------
// Helpers

namespace harness {

/// Running maximum that remembers where it was attained.
struct Extremum {
  double value = -std::numeric_limits<double>::infinity();
  nlohmann::json where = nlohmann::json::object();
  bool saw_nan = false;

  template <class Where>
  void offer(double v, Where&& where_fn) {
    if (std::isnan(v)) {
      saw_nan = true;
      return;
    }
    if (v > value) {
      value = v;
      where = where_fn();
    }
  }

  double result() const { return saw_nan ? std::numeric_limits<double>::quiet_NaN() : value; }
};

/// Running minimum.
struct Minimum {
  double value = std::numeric_limits<double>::infinity();
  nlohmann::json where = nlohmann::json::object();

  template <class Where>
  void offer(double v, Where&& where_fn) {
    if (std::isnan(v)) v = -std::numeric_limits<double>::infinity();
    if (v < value) {
      value = v;
      where = where_fn();
    }
  }
};

inline nlohmann::json node_json(const UniformGrid& g, std::size_t k) {
  const Point x = g.node(k);
  nlohmann::json xs = nlohmann::json::array();
  for (int d = 0; d < g.dim(); ++d) xs.push_back(x[d]);
  return {{"N", g.points_per_axis()}, {"x", xs}};
}

inline nlohmann::json cube_json(const UniformGrid& g, const Cube& q) {
  nlohmann::json a = nlohmann::json::array();
  for (int d = 0; d < g.dim(); ++d) a.push_back(q.anchor[d]);
  return {{"N", g.points_per_axis()}, {"anchor", a}, {"side_cells", q.side}};
}

inline UniformGrid grid_at(const ExperimentSpec& s, int N) { return UniformGrid(BoxDomain(s.dim, s.half_extent), N); }

/// Consecutive values differ by at most tol relative to the coarser one.
inline bool stable(const std::vector<ResolutionPoint>& pts, double tol) {
  if (pts.empty()) return false;
  for (const auto& p : pts)
    if (!std::isfinite(p.value)) return false;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double a = pts[i - 1].value, b = pts[i].value;
    if (std::abs(b - a) > tol * std::abs(a)) return false;
  }
  return true;
}

/// Finite and never growing by more than tol from one resolution to the next.
inline bool bounded(const std::vector<ResolutionPoint>& pts, double tol) {
  if (pts.empty()) return false;
  for (const auto& p : pts)
    if (!std::isfinite(p.value)) return false;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].value > (1.0 + tol) * pts[i - 1].value) return false;
  return true;
}

inline nlohmann::json points_json(const std::vector<ResolutionPoint>& pts) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& p : pts) a.push_back({{"N", p.N}, {"value", p.value}});
  return a;
}

/// Default exponents, all log-Hölder with p_- > 1.
inline ExponentSpec exponent_a() { return {"log_perturbed", {2.0, 0.5}}; }          // 2 … 2.5
inline ExponentSpec exponent_b() { return {"bump", {1.8, 0.5, 1.0, 0.0, 0.0}}; }     // 1.8 … 2.3
inline ExponentSpec exponent_c() { return {"radial_step", {2.5, 1.6, 1.0, 0.3}}; }  // 1.6 … 2.5
inline ExponentSpec exponent_r() { return {"log_perturbed", {1.5, 0.3}}; }          // 1.5 … 1.8

inline std::vector<ExponentSpec> default_exponents(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::holder_integral:
    case ExperimentKind::char_norm_equiv: return {exponent_a(), exponent_b(), exponent_c()};
    case ExperimentKind::holder_product: return {exponent_a(), exponent_c()};
    case ExperimentKind::sharp_norm_bound: return {exponent_b(), {"constant", {1.5}}};
    case ExperimentKind::thm31_ratio:
    case ExperimentKind::frac_bound: return {exponent_a(), exponent_a()};
    case ExperimentKind::thm32_ratio: return {exponent_a(), exponent_a(), exponent_r()};
    default: return {exponent_b()};
  }
}

inline std::vector<ExponentField> exponents_of(const ExperimentSpec& s) {
  const auto specs = s.exponents.empty() ? default_exponents(s.kind) : s.exponents;
  std::vector<ExponentField> out;
  for (const auto& e : specs) out.push_back(e.build(s.dim));
  return out;
}

inline const ExponentField& exponent_at(const std::vector<ExponentField>& ps, std::size_t i) {
  return ps[std::min(i, ps.size() - 1)];
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

/// m exponents p_1..p_m from the list; missing entries repeat the last one.
inline std::vector<ExponentField> slot_exponents(const std::vector<ExponentField>& ps, int m) {
  std::vector<ExponentField> out;
  for (int j = 0; j < m; ++j) out.push_back(exponent_at(ps, static_cast<std::size_t>(j)));
  return out;
}

inline double product_of_norms(const std::vector<GridFunction>& fs, const std::vector<ExponentField>& ps) {
  double prod = 1.0;
  for (std::size_t j = 0; j < fs.size(); ++j) prod *= lnorm(fs[j], ps[j]);
  return prod;
}

inline std::vector<std::vector<TestFunction>> input_family(const ExperimentSpec& spec, int per_case,
                                                           bool nonnegative, std::uint64_t salt = 0) {
  FunctionSampler s(spec.seed + salt, spec.dim, spec.half_extent, nonnegative);
  const auto only = parse_input_family(spec.inputs);
  std::vector<std::vector<TestFunction>> out;
  for (int c = 0; c < spec.cases; ++c) {
    if (!only) {
      out.push_back(s.take(static_cast<std::size_t>(per_case)));
      continue;
    }
    std::vector<TestFunction> v;
    for (int j = 0; j < per_case; ++j) v.push_back(s.next_of(*only));
    out.push_back(v);
  }
  return out;
}

inline std::vector<std::vector<TestFunction>> symbol_family(const ExperimentSpec& spec, int per_case, double delta,
                                                            std::uint64_t salt = 1000) {
  FunctionSampler s(spec.seed + salt, spec.dim, spec.half_extent, false);
  std::vector<std::vector<TestFunction>> out;
  for (int c = 0; c < spec.cases; ++c) {
    std::vector<TestFunction> v;
    for (int j = 0; j < per_case; ++j) v.push_back(s.symbol(delta));
    out.push_back(v);
  }
  return out;
}

inline nlohmann::json describe(const std::vector<TestFunction>& fs) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& f : fs) a.push_back(f.describe());
  return a;
}

}  // namespace harness

// ---------------------------------------------------------------------------
// Doubling parameters

struct DoublingParameters {
  bool found = false;
  double a = 0.0;
  int k0 = 0;
  double eps0 = 0.0;
  double factor = 0.0;           // a^{n-n/β+1}/2
  double doubling_constant = 0.0;  // factor^{k0}·2
  std::size_t tested_pairs = 0;
};

inline nlohmann::json to_json(const DoublingParameters& d) {
  return {{"found", d.found}, {"a", d.a},           {"k0", d.k0},
          {"eps0", d.eps0},   {"factor", d.factor}, {"doubling_constant", d.doubling_constant},
          {"tested_pairs", d.tested_pairs}};
}

/// Least k with a^{k-1} < 2 < a^k, or 0 when the strict inequalities fail.
inline int doubling_k0(double a) {
  if (!(a > 1.0)) return 0;
  int k = static_cast<int>(std::ceil(std::log(2.0) / std::log(a)));
  k = std::max(k, 1);
  if (std::pow(a, k - 1) < 2.0 && 2.0 < std::pow(a, k)) return k;
  return 0;
}

inline constexpr double kDoublingSlack = 1e-12;

/// Smallest a in {1.1, 1.2, …, 4.0} with ‖χ_{aQ}‖_{p'} ≤ (a^{n-n/β+1}/2)‖χ_Q‖_{p'}
/// for every cube Q of the family whose dilate aQ stays inside the domain.
inline DoublingParameters find_doubling_parameters(const ExponentField& p, const UniformGrid& g,
                                                   const CubeFamily& fam, double beta,
                                                   double tol = kDefaultTol) {
  const int n = g.dim();
  const auto conj = sample_exponent(conjugate(p), g);
  const auto cubes = enumerate_cubes(g, fam);
  std::vector<double> base(cubes.size(), -1.0);
  for (int k = 11; k <= 40; ++k) {
    const double a = k / 10.0;
    const int k0 = doubling_k0(a);
    if (k0 == 0) continue;
    const double factor = std::pow(a, n - n / beta + 1.0) / 2.0;
    bool ok = true;
    std::size_t tested = 0;
    for (std::size_t c = 0; c < cubes.size() && ok; ++c) {
      const GeomCube q = GeomCube::of(g, cubes[c]);
      const GeomCube aq = q.dilate(a);
      if (!aq.inside(g.domain())) continue;
      if (base[c] < 0.0) base[c] = char_norm(conj, q, tol);
      ++tested;
      if (char_norm(conj, aq, tol) > factor * base[c] * (1.0 + kDoublingSlack)) ok = false;
    }
    if (ok && tested > 0) {
      DoublingParameters d;
      d.found = true;
      d.a = a;
      d.k0 = k0;
      d.eps0 = 1.0 / k0;
      d.factor = factor;
      d.doubling_constant = std::pow(factor, k0) * 2.0;
      d.tested_pairs = tested;
      return d;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Experiments

namespace harness {

using Report = ExperimentReport;

/// Records one value per resolution; measured = max over resolutions; pass = measured ≤ bound.
inline void finish_bounded_max(Report& r, const std::vector<ResolutionPoint>& pts, double bound) {
  r.resolutions = pts;
  double m = -std::numeric_limits<double>::infinity();
  bool finite = true;
  for (const auto& p : pts) {
    if (!std::isfinite(p.value)) finite = false;
    m = std::max(m, p.value);
  }
  r.measured_constant = finite ? m : std::numeric_limits<double>::quiet_NaN();
  r.asserted_bound = bound;
  r.pass = finite && m <= bound;
}

/// measured = value at the finest resolution; pass = stable under refinement.
inline void finish_stable(Report& r, const ExperimentSpec& s, const std::vector<ResolutionPoint>& pts) {
  r.resolutions = pts;
  r.measured_constant = pts.empty() ? std::numeric_limits<double>::quiet_NaN() : pts.back().value;
  r.pass = stable(pts, s.stability_tol);
}

inline Report holder_integral(const ExperimentSpec& s) {
  Report r;
  const auto ps = exponents_of(s);
  for (const auto& p : ps) require(p.range().lo > 1.0, "holder_integral: need p_- > 1");
  const auto family = input_family(s, 2, false);
  Extremum best;
  std::vector<ResolutionPoint> pts;
  std::size_t evaluated = 0;
  for (int N : s.resolutions) {
    const auto g = grid_at(s, N);
    Extremum at_n;
    for (std::size_t e = 0; e < ps.size(); ++e) {
      const auto pc = conjugate(ps[e]);
      for (std::size_t c = 0; c < family.size(); ++c) {
        const auto f = family[c][0].on(g), h = family[c][1].on(g);
        const double nf = lnorm(f, ps[e]), nh = lnorm(h, pc);
        if (nf == 0.0 || nh == 0.0) continue;
        ++evaluated;
        const double ratio = integrate((f * h).abs()) / (nf * nh);
        auto where = [&] {
          return nlohmann::json{{"N", N}, {"exponent", e}, {"case", c}, {"functions", describe(family[c])}};
        };
        at_n.offer(ratio, where);
        best.offer(ratio, where);
      }
    }
    pts.push_back({N, at_n.result()});
  }
  finish_bounded_max(r, pts, 2.0 + 1e-6);
  r.argmax = best.where;
  r.details["evaluated_pairs"] = evaluated;
  return r;
}

inline Report holder_product(const ExperimentSpec& s) {
  Report r;
  const auto ps = slot_exponents(exponents_of(s), 2);
  const auto q = harmonic_combine(ps);
  const auto family = input_family(s, 2, false);
  Extremum best;
  std::vector<ResolutionPoint> pts;
  for (int N : s.resolutions) {
    const auto g = grid_at(s, N);
    Extremum at_n;
    for (std::size_t c = 0; c < family.size(); ++c) {
      const std::vector<GridFunction> fs{family[c][0].on(g), family[c][1].on(g)};
      const double denom = product_of_norms(fs, ps);
      if (denom == 0.0) continue;
      const double ratio = lnorm(fs[0] * fs[1], q) / denom;
      auto where = [&] { return nlohmann::json{{"N", N}, {"case", c}, {"functions", describe(family[c])}}; };
      at_n.offer(ratio, where);
      best.offer(ratio, where);
    }
    pts.push_back({N, at_n.result()});
  }
  finish_bounded_max(r, pts, 4.0 + 1e-6);
  r.argmax = best.where;
  return r;
}

inline Report holder_orlicz(const ExperimentSpec& s) {
  Report r;
  require(s.t >= 1.0, "holder_orlicz: need t ≥ 1");
  const auto phi_exp = s.t == 1.0 ? YoungFunction::expl() : YoungFunction::explt(s.t);
  const auto phi_log = YoungFunction::llogl(1.0 / s.t);
  const auto family = input_family(s, 2, false);
  Extremum best;
  std::vector<ResolutionPoint> pts;
  for (int N : s.resolutions) {
    const auto g = grid_at(s, N);
    const auto cubes = enumerate_cubes(g, s.family);
    Extremum at_n;
    for (std::size_t c = 0; c < family.size(); ++c) {
      const auto f = family[c][0].on(g), h = family[c][1].on(g);
      const auto fh = (f * h).abs();
      for (const auto& q : cubes) {
        const double lhs = cube_average(fh, q);
        if (lhs == 0.0) continue;
        const double rhs = orlicz_cube_average(f, q, phi_exp) * orlicz_cube_average(h, q, phi_log);
        auto where = [&] {
          auto w = cube_json(g, q);
          w["case"] = c;
          return w;
        };
        at_n.offer(lhs / rhs, where);
        best.offer(lhs / rhs, where);
      }
    }
    pts.push_back({N, at_n.result()});
  }
  finish_stable(r, s, pts);
  r.argmax = best.where;
  r.details["young_exp"] = phi_exp.name();
  r.details["young_log"] = phi_log.name();
  return r;
}

inline Report char_norm_equiv(const ExperimentSpec& s) {
  Report r;
  const auto ps = exponents_of(s);
  const int n = s.dim;
  std::vector<ResolutionPoint> lo_pts, hi_pts, small_lo, small_hi;
  std::size_t violations = 0, doubling_checked = 0;
  double worst_doubling = 0.0;
  nlohmann::json doubling = nlohmann::json::array();
  Extremum best;
  for (int N : s.resolutions) {
    const auto g = grid_at(s, N);
    const auto cubes = enumerate_cubes(g, s.family);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    double slo = std::numeric_limits<double>::infinity(), shi = 0.0;
    for (std::size_t e = 0; e < ps.size(); ++e) {
      const auto& p = ps[e];
      require(p.range().lo > 1.0, "char_norm_equiv: need p_- > 1");
      const auto samples = sample_exponent(p, g);
      const auto norms = char_norms(samples, cubes);
      for (std::size_t c = 0; c < cubes.size(); ++c) {
        const double vol = cubes[c].volume(g);
        const double ratio = norms[c] / std::pow(vol, 1.0 / harmonic_mean(samples, cubes[c]));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        best.offer(ratio, [&] {
          auto w = cube_json(g, cubes[c]);
          w["exponent"] = e;
          return w;
        });
        if (vol <= std::pow(2.0, n)) {
          const double sr = norms[c] / std::pow(vol, 1.0 / p(cubes[c].center(g)));
          slo = std::min(slo, sr);
          shi = std::max(shi, sr);
        }
      }
      const auto d = find_doubling_parameters(p, g, s.family, s.beta);
      auto dj = to_json(d);
      dj["N"] = N;
      dj["exponent"] = e;
      if (d.found) {
        for (std::size_t c = 0; c < cubes.size(); ++c) {
          const GeomCube q = GeomCube::of(g, cubes[c]);
          const GeomCube q2 = q.dilate(2.0);
          if (!q2.inside(g.domain())) continue;
          ++doubling_checked;
          const double ratio = char_norm(samples, q2) / norms[c];
          worst_doubling = std::max(worst_doubling, ratio / d.doubling_constant);
          if (ratio > d.doubling_constant) ++violations;
        }
      } else {
        ++violations;
      }
      doubling.push_back(dj);
    }
    lo_pts.push_back({N, lo});
    hi_pts.push_back({N, hi});
    small_lo.push_back({N, slo});
    small_hi.push_back({N, shi});
  }
  r.resolutions = hi_pts;
  r.measured_constant = hi_pts.back().value;
  r.argmax = best.where;
  r.details["window_lo"] = points_json(lo_pts);
  r.details["window_hi"] = points_json(hi_pts);
  r.details["small_cube_window_lo"] = points_json(small_lo);
  r.details["small_cube_window_hi"] = points_json(small_hi);
  r.details["doubling"] = doubling;
  r.details["doubling_checked"] = doubling_checked;
  r.details["doubling_violations"] = violations;
  r.details["doubling_worst_fraction_of_bound"] = worst_doubling;
  r.pass = stable(lo_pts, s.stability_tol) && stable(hi_pts, s.stability_tol) && violations == 0;
  return r;
}

inline Report weight_identity(const ExperimentSpec& s) {
  Report r;
  const auto p = exponents_of(s).front();
  const int n = s.dim;
  require(s.gamma >= 0.0 && s.gamma < n, "weight_identity: need 0 ≤ γ < n");
  require(p.range().hi < n / s.gamma, "weight_identity: need p_+ < n/γ");
  const auto q = delta_shift(p, s.gamma, n);
  const auto pc = conjugate(p);
  Extremum best;
  std::vector<ResolutionPoint> pts;
  for (int N : s.resolutions) {
    const auto g = grid_at(s, N);
    const auto cubes = enumerate_cubes(g, s.family);
    const auto nq = char_norms(sample_exponent(q, g), cubes);
    const auto np = char_norms(sample_exponent(pc, g), cubes);
    Extremum at_n;
    for (std::size_t c = 0; c < cubes.size(); ++c) {
      const double v = nq[c] * np[c] / std::pow(cubes[c].volume(g), 1.0 - s.gamma / n);
      at_n.offer(v, [&] { return cube_json(g, cubes[c]); });
      best.offer(v, [&] { return cube_json(g, cubes[c]); });
    }
    pts.push_back({N, at_n.result()});
  }
  finish_stable(r, s, pts);
  r.argmax = best.where;
  return r;
}

inline Report kolmogorov(const ExperimentSpec& s) {
  Report r;
  struct Case {
    TestFunction f;
    double p, q, centre0, centre1, frac;
  };
  FunctionSampler sampler(s.seed, s.dim, s.half_extent, false);
  std::vector<Case> cases;
  for (int c = 0; c < s.cases; ++c) {
    Case k{sampler.next(), 0, 0, 0, 0, 0};
    k.p = sampler.uniform(0.1, 3.8);
    k.q = sampler.uniform(k.p + 0.05, 4.0);
    k.centre0 = sampler.uniform(0.0, 1.0);
    k.centre1 = sampler.uniform(0.0, 1.0);
    k.frac = sampler.uniform(0.05, 0.6);
    cases.push_back(k);
  }
  Extremum best;
  std::vector<ResolutionPoint> pts;
  std::size_t violations = 0, evaluated = 0;
  for (int N : s.resolutions) {
    const auto g = grid_at(s, N);
    Extremum at_n;
    for (std::size_t c = 0; c < cases.size(); ++c) {
      const auto& k = cases[c];
      const int side = std::max(1, static_cast<int>(k.frac * N));
      const int span = N - side;
      Cube q{{static_cast<int>(k.centre0 * span), s.dim > 1 ? static_cast<int>(k.centre1 * span) : 0}, side};
      auto f = k.f.on(g);
      if (restrict_to(f, q).is_zero()) f = f.map([](double v) { return v + 1.0; });
      const double vol = q.volume(g);
      const double cpq = std::pow(k.q / (k.q - k.p), 1.0 / k.p);
      const double lhs = std::pow(vol, -1.0 / k.p) * lebesgue_norm(f, q, k.p);
      const double rhs = cpq * std::pow(vol, -1.0 / k.q) * weak_lebesgue_norm(f, q, k.q);
      ++evaluated;
      const double ratio = lhs / rhs;
      if (!(ratio <= 1.0)) ++violations;
      auto where = [&] {
        auto w = cube_json(g, q);
        w["case"] = c;
        w["p"] = k.p;
        w["q"] = k.q;
        return w;
      };
      at_n.offer(ratio, where);
      best.offer(ratio, where);
    }
    pts.push_back({N, at_n.result()});
  }
  finish_bounded_max(r, pts, 1.0);
  r.argmax = best.where;
  r.details["violations"] = violations;
  r.details["evaluated"] = evaluated;
  r.details["constant"] = "(q/(q-p))^(1/p)";
  return r;
}

inline Report maximal_chain(const ExperimentSpec& s) {
  Report r;
  require(s.r > 1.0, "maximal_chain: need r > 1");
  const int m = s.kernel.m;
  const auto family = input_family(s, m, false);
  Minimum link1, link2;
  Extremum third, m2;
  std::vector<ResolutionPoint> pts, m2_pts;
  for (int N : s.resolutions) {
    const auto g = grid_at(s, N);
    Extremum at_n, m2_n;
    for (std::size_t c = 0; c < family.size(); ++c) {
      std::vector<GridFunction> fs;
      for (const auto& f : family[c]) fs.push_back(f.on(g));
      const auto M = multilinear_maximal(fs, maximal::MultiM{}, s.family);
      const auto ML = multilinear_maximal(fs, maximal::MultiLlogL{}, s.family);
      const auto Mr = multilinear_maximal(fs, maximal::MultiMr{s.r}, s.family);
      GridFunction m2prod = GridFunction::sample(g, [](const Point&) { return 1.0; });
      for (const auto& f : fs) m2prod = m2prod * hl_maximal(hl_maximal(f, s.family), s.family);
      for (int i = 1; i <= m; ++i) {
        const auto Mi = multilinear_maximal(fs, maximal::MultiLlogLi{i}, s.family);
        for (std::size_t k = 0; k < g.size(); ++k) {
          auto where = [&] {
            auto w = node_json(g, k);
            w["case"] = c;
            w["slot"] = i;
            return w;
          };
          link1.offer(Mi[k] - M[k], where);
          link2.offer(ML[k] - Mi[k], where);
        }
      }
      for (std::size_t k = 0; k < g.size(); ++k) {
        auto where = [&] {
          auto w = node_json(g, k);
          w["case"] = c;
          return w;
        };
        if (Mr[k] > 0.0) {
          at_n.offer(ML[k] / Mr[k], where);
          third.offer(ML[k] / Mr[k], where);
        }
        if (m2prod[k] > 0.0) {
          m2_n.offer(ML[k] / m2prod[k], where);
          m2.offer(ML[k] / m2prod[k], where);
        }
      }
    }
    pts.push_back({N, at_n.result()});
    m2_pts.push_back({N, m2_n.result()});
  }
  constexpr double slack = -1e-12;
  const bool links_ok = link1.value >= slack && link2.value >= slack;
  r.resolutions = pts;
  r.measured_constant = pts.back().value;
  r.argmax = third.where;
  r.details["link1_min_slack"] = link1.value;
  r.details["link1_where"] = link1.where;
  r.details["link2_min_slack"] = link2.value;
  r.details["link2_where"] = link2.where;
  r.details["third_link_r"] = s.r;
  r.details["m2_ratio"] = points_json(m2_pts);
  r.details["m2_ratio_where"] = m2.where;
  r.pass = links_ok && stable(pts, s.stability_tol);
  return r;
}

/// ‖b‖ in 𝕃(δ(·)) with δ(·)/n = 1/β - 1/p(·).
inline double variable_lipschitz_norm(const GridFunction& b, const ExponentField& p, double beta,
                                      const CubeFamily& fam) {
  return lipschitz_norm(b, lipschitz::OscDeltaVar{beta, p}, fam);
}

inline Report expL_avg_bound(const ExperimentSpec& s) {
  Report r;
  const auto p = exponents_of(s).front();
  const int n = s.dim;
  const auto symbols = symbol_family(s, 1, s.delta);
  const auto phi = YoungFunction::expl();
  Extremum best, tele;
  std::vector<ResolutionPoint> pts, tele_pts;
  nlohmann::json doubling = nlohmann::json::array();
  for (int N : s.resolutions) {
    const auto g = grid_at(s, N);
    check_variable_sharp_params(p, s.beta, 1.0, g);
    const auto cubes = enumerate_cubes(g, s.family);
    const auto pre = variable_sharp_prefactors(p, s.beta, g, cubes);
    const auto conj = sample_exponent(conjugate(p), g);
    const auto d = find_doubling_parameters(p, g, s.family, s.beta);
    auto dj = to_json(d);
    dj["N"] = N;
    doubling.push_back(dj);
    Extremum at_n, tele_n;
    for (std::size_t c = 0; c < symbols.size(); ++c) {
      const auto b = symbols[c][0].on(g);
      const double bn = variable_lipschitz_norm(b, p, s.beta, s.family);
      if (bn == 0.0) continue;
      for (std::size_t k = 0; k < cubes.size(); ++k) {
        const auto v = cube_values(b, cubes[k]);
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        std::vector<double> dev(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) dev[i] = v[i] - mean;
        const double ratio = orlicz_average(dev, phi) / pre[k] / bn;
        auto where = [&] {
          auto w = cube_json(g, cubes[k]);
          w["case"] = c;
          w["symbol"] = symbols[c][0].describe();
          return w;
        };
        at_n.offer(ratio, where);
        best.offer(ratio, where);
      }
      if (!d.found) continue;
      // |b_{a^{k0(j+1)}Q} - b_{a^{k0}Q}| against j·‖b‖·|a^{k0(j+1)}Q|^{1/β-1}‖χ‖_{p'}
      const double step = std::pow(d.a, d.k0);
      for (const auto& q : cubes) {
        const GeomCube base = GeomCube::of(g, q);
        const GeomCube first = base.dilate(step);
        if (!first.inside(g.domain())) continue;
        const double b_first = geom_average(b, first);
        for (int j = 1; j <= 4; ++j) {
          const GeomCube big = base.dilate(std::pow(step, j + 1));
          if (!big.inside(g.domain())) break;
          const double gap = std::abs(geom_average(b, big) - b_first);
          const double scale = j * bn * std::pow(big.volume(n), 1.0 / s.beta - 1.0) * char_norm(conj, big);
          const double ratio = gap / scale;
          auto where = [&] {
            auto w = cube_json(g, q);
            w["case"] = c;
            w["j"] = j;
            return w;
          };
          tele_n.offer(ratio, where);
          tele.offer(ratio, where);
        }
      }
    }
    pts.push_back({N, at_n.result()});
    tele_pts.push_back({N, tele_n.result()});
  }
  finish_stable(r, s, pts);
  r.argmax = best.where;
  r.details["telescoping"] = points_json(tele_pts);
  r.details["telescoping_where"] = tele.where;
  r.details["doubling"] = doubling;
  return r;
}

struct SharpRun {
  double value;
  nlohmann::json where;
};

/// sup_x (T_{b_j}f⃗)^♯_{δ(·),γ}(x) / [‖b_j‖·(M_η(Tf⃗)(x) + 𝓜_{LlogL}(f⃗)(x))] over the family.
inline SharpRun pointwise_sharp_at(const ExperimentSpec& s, const ExponentField& p, int N, double rho,
                                   const std::vector<std::vector<TestFunction>>& inputs,
                                   const std::vector<std::vector<TestFunction>>& symbols) {
  const auto g = grid_at(s, N);
  const int m = s.kernel.m;
  check_variable_sharp_params(p, s.beta, s.gamma, g);
  const auto K = make_mollified_cz_kernel(m, s.dim, rho);
  const auto cubes = enumerate_cubes(g, s.family);
  const auto pre = variable_sharp_prefactors(p, s.beta, g, cubes);
  Extremum at;
  for (std::size_t c = 0; c < inputs.size(); ++c) {
    std::vector<GridFunction> fs;
    for (const auto& f : inputs[c]) fs.push_back(f.on(g));
    const auto Tf = apply_multilinear(K, fs);
    const auto rhs_base = m_epsilon(Tf, s.eta, s.family) + multilinear_maximal(fs, maximal::MultiLlogL{}, s.family);
    for (int j = 1; j <= m; ++j) {
      const auto b = symbols[c][static_cast<std::size_t>(j - 1)].on(g);
      const double bn = variable_lipschitz_norm(b, p, s.beta, s.family);
      if (bn == 0.0) continue;
      const auto comm = commutator_j(K, b, j, fs);
      const auto lhs = sharp_maximal_var(comm, s.gamma, cubes, pre);
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (lhs[k] == 0.0) continue;
        const double ratio = lhs[k] / (bn * rhs_base[k]);
        at.offer(ratio, [&] {
          auto w = node_json(g, k);
          w["case"] = c;
          w["slot"] = j;
          w["rho"] = rho;
          return w;
        });
      }
    }
  }
  return {at.result(), at.where};
}

inline Report pointwise_sharp(const ExperimentSpec& s) {
  Report r;
  const int m = s.kernel.m;
  require(m >= 2, "pointwise_sharp: need m ≥ 2");
  require(s.gamma > 0.0 && s.gamma < s.eta && s.eta < 1.0 / m, "pointwise_sharp: need 0 < γ < η < 1/m");
  const auto p = exponents_of(s).front();
  const auto inputs = input_family(s, m, false);
  const auto symbols = symbol_family(s, m, s.delta);
  const int N0 = s.resolutions.front();
  const double h0 = grid_at(s, N0).spacing();
  const double rho = s.kernel.rho_cells * h0;

  Extremum best;
  std::vector<ResolutionPoint> pts;
  for (int N : s.resolutions) {
    const auto run = pointwise_sharp_at(s, p, N, rho, inputs, symbols);
    pts.push_back({N, run.value});
    best.offer(run.value, [&] { return run.where; });
  }
  std::vector<ResolutionPoint> rho_pts;
  nlohmann::json rho_json = nlohmann::json::array();
  for (double cells : s.rho_sweep) {
    const double v = cells == s.kernel.rho_cells ? pts.front().value
                                                 : pointwise_sharp_at(s, p, N0, cells * h0, inputs, symbols).value;
    rho_pts.push_back({N0, v});
    rho_json.push_back({{"rho_cells", cells}, {"rho", cells * h0}, {"value", v}});
  }
  r.resolutions = pts;
  r.measured_constant = pts.back().value;
  r.argmax = best.where;
  r.kernel = to_json(make_mollified_cz_kernel(m, s.dim, rho));
  r.details["rho_sweep"] = rho_json;
  r.details["resolution_stable"] = stable(pts, s.stability_tol);
  r.details["rho_stable"] = stable(rho_pts, s.stability_tol);
  const auto d = find_doubling_parameters(p, grid_at(s, N0), s.family, s.beta);
  auto dj = to_json(d);
  const double eps = 1.0;
  dj["kernel_eps"] = eps;
  dj["eps_admissible"] = d.found && d.eps0 < eps;
  r.details["doubling"] = dj;
  r.pass = stable(pts, s.stability_tol) && stable(rho_pts, s.stability_tol);
  return r;
}

inline Report sharp_norm_bound(const ExperimentSpec& s) {
  Report r;
  const auto ps = exponents_of(s);
  const auto p = ps.front();
  const auto rr = exponent_at(ps, 1);
  const int n = s.dim;
  require(s.gamma > 0.0 && s.gamma < 1.0, "sharp_norm_bound: need 0 < γ < 1");
  const auto delta = lipschitz_order(rr, s.beta, n);
  const auto dr = delta.range();
  require(dr.lo >= 0.0 && dr.hi <= 1.0, "sharp_norm_bound: need 0 ≤ δ(·) ≤ 1");
  const auto q = delta_shift(p, delta, n);
  const auto family = input_family(s, 1, false);
  Extremum best;
  std::vector<ResolutionPoint> pts;
  for (int N : s.resolutions) {
    const auto g = grid_at(s, N);
    check_variable_sharp_params(rr, s.beta, s.gamma, g);
    const auto cubes = enumerate_cubes(g, s.family);
    const auto pre = variable_sharp_prefactors(rr, s.beta, g, cubes);
    Extremum at_n;
    for (std::size_t c = 0; c < family.size(); ++c) {
      const auto f = family[c][0].on(g);
      const double den = lnorm(sharp_maximal_var(f, s.gamma, cubes, pre), p);
      if (den == 0.0) continue;
      const double ratio = lnorm(f, q) / den;
      auto where = [&] { return nlohmann::json{{"N", N}, {"case", c}, {"function", family[c][0].describe()}}; };
      at_n.offer(ratio, where);
      best.offer(ratio, where);
    }
    pts.push_back({N, at_n.result()});
  }
  finish_stable(r, s, pts);
  r.argmax = best.where;
  return r;
}

inline Report thm31_domination(const ExperimentSpec& s) {
  Report r;
  const int m = s.kernel.m;
  require(m == 2, "thm31_domination: need m = 2");
  require(s.delta > 0.0 && s.delta < 1.0, "thm31_domination: need 0 < δ < 1");
  const auto inputs = input_family(s, m, true);
  const auto symbols = symbol_family(s, 1, s.delta);
  const double rho = s.kernel.rho_cells * grid_at(s, s.resolutions.front()).spacing();
  const auto K = make_mollified_cz_kernel(m, s.dim, rho);
  const auto I = make_fractional_kernel(m, s.dim, s.delta);
  Extremum best;
  std::vector<ResolutionPoint> pts;
  std::size_t violations = 0;
  constexpr double slack = 0.05;
  for (int N : s.resolutions) {
    const auto g = grid_at(s, N);
    Extremum at_n;
    for (std::size_t c = 0; c < inputs.size(); ++c) {
      std::vector<GridFunction> fs;
      for (const auto& f : inputs[c]) fs.push_back(f.on(g).abs());
      const auto b = symbols[c][0].on(g);
      const double bn = lambda_norm(b, s.delta);
      if (bn == 0.0) continue;
      const auto lhs = commutator_j(K, b, 1, fs).abs();
      const auto rhs = apply_multilinear(I, fs);
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (rhs[k] <= 0.0) continue;
        const double ratio = lhs[k] / (bn * rhs[k]);
        if (ratio > 1.0 + slack) ++violations;
        auto where = [&] {
          auto w = node_json(g, k);
          w["case"] = c;
          return w;
        };
        at_n.offer(ratio, where);
        best.offer(ratio, where);
      }
    }
    pts.push_back({N, at_n.result()});
  }
  finish_bounded_max(r, pts, 1.0 + slack);
  r.argmax = best.where;
  r.kernel = to_json(K);
  r.details["violations"] = violations;
  return r;
}

inline Report commutator_ratio(const ExperimentSpec& s, bool variable) {
  Report r;
  const int m = s.kernel.m;
  const int n = s.dim;
  const auto all = exponents_of(s);
  const auto ps = slot_exponents(all, m);
  const auto p = harmonic_combine(ps);
  ExponentField q = p;
  ExponentField rr = all.back();
  if (variable) {
    require(static_cast<int>(all.size()) > m, "thm32_ratio: need m slot exponents followed by r(·)");
    const auto delta = lipschitz_order(rr, s.beta, n);
    const auto dr = delta.range();
    require(dr.lo > 0.0 && dr.hi < 1.0, "thm32_ratio: need 0 < δ(·) < 1");
    for (const auto& pj : ps) require(pj.range().hi * dr.hi < n, "thm32_ratio: need sup p_j δ < n");
    q = delta_shift(p, delta, n);
  } else {
    require(s.delta > 0.0 && s.delta < 1.0, "thm31_ratio: need 0 < δ < 1");
    for (const auto& pj : ps) {
      const auto pr = pj.range();
      require(pr.lo > m * n / (s.delta + n) && pr.hi < m * n / s.delta,
              "thm31_ratio: need mn/(δ+n) < p_- ≤ p_+ < mn/δ");
    }
    q = delta_shift(p, s.delta, n);
  }
  const auto inputs = input_family(s, m, false);
  const auto symbols = symbol_family(s, m, s.delta);
  const double rho = s.kernel.rho_cells * grid_at(s, s.resolutions.front()).spacing();
  const auto K = make_mollified_cz_kernel(m, n, rho);
  Extremum best;
  std::vector<ResolutionPoint> pts;
  for (int N : s.resolutions) {
    const auto g = grid_at(s, N);
    if (variable) check_variable_sharp_params(rr, s.beta, 1.0, g);
    Extremum at_n;
    for (std::size_t c = 0; c < inputs.size(); ++c) {
      std::vector<GridFunction> fs;
      for (const auto& f : inputs[c]) fs.push_back(f.on(g));
      const double denom_f = product_of_norms(fs, ps);
      if (denom_f == 0.0) continue;
      for (int j = 1; j <= m; ++j) {
        const auto b = symbols[c][static_cast<std::size_t>(j - 1)].on(g);
        const double bn = variable ? variable_lipschitz_norm(b, rr, s.beta, s.family)
                                   : lipschitz_norm(b, lipschitz::OscDelta{s.delta}, s.family);
        if (bn == 0.0) continue;
        const double ratio = lnorm(commutator_j(K, b, j, fs), q) / (bn * denom_f);
        auto where = [&] {
          return nlohmann::json{{"N", N}, {"case", c}, {"slot", j}, {"symbol", symbols[c][j - 1].describe()}};
        };
        at_n.offer(ratio, where);
        best.offer(ratio, where);
      }
    }
    pts.push_back({N, at_n.result()});
  }
  finish_stable(r, s, pts);
  r.argmax = best.where;
  r.kernel = to_json(K);
  return r;
}

inline Report frac_bound(const ExperimentSpec& s) {
  Report r;
  const int m = s.kernel.m;
  const int n = s.dim;
  require(s.alpha > 0.0 && s.alpha < m * n, "frac_bound: need 0 < α < mn");
  const auto ps = slot_exponents(exponents_of(s), m);
  for (const auto& pj : ps) require(pj.range().hi < m * n / s.alpha, "frac_bound: need p_j+ < mn/α");
  const auto q = delta_shift(harmonic_combine(ps), s.alpha, n);
  const auto I = make_fractional_kernel(m, n, s.alpha);
  const auto inputs = input_family(s, m, false);
  Extremum best;
  std::vector<ResolutionPoint> pts;
  for (int N : s.resolutions) {
    const auto g = grid_at(s, N);
    Extremum at_n;
    for (std::size_t c = 0; c < inputs.size(); ++c) {
      std::vector<GridFunction> fs;
      for (const auto& f : inputs[c]) fs.push_back(f.on(g));
      const double denom = product_of_norms(fs, ps);
      if (denom == 0.0) continue;
      const double ratio = lnorm(apply_multilinear(I, fs), q) / denom;
      auto where = [&] { return nlohmann::json{{"N", N}, {"case", c}, {"functions", describe(inputs[c])}}; };
      at_n.offer(ratio, where);
      best.offer(ratio, where);
    }
    pts.push_back({N, at_n.result()});
  }
  finish_stable(r, s, pts);
  r.argmax = best.where;
  r.kernel = to_json(I);
  return r;
}

inline Report maximal_bound_trend(const ExperimentSpec& s) {
  Report r;
  const auto p = exponents_of(s).front();
  const auto pc = conjugate(p);
  const auto inputs = input_family(s, 1, false);
  Extremum best;
  std::vector<ResolutionPoint> pts, pts_p, pts_pc;
  for (int N : s.resolutions) {
    const auto g = grid_at(s, N);
    Extremum at_p, at_pc;
    for (std::size_t c = 0; c < inputs.size(); ++c) {
      const auto f = inputs[c][0].on(g);
      if (f.is_zero()) continue;
      const auto Mf = hl_maximal(f, s.family);
      const double rp = lnorm(Mf, p) / lnorm(f, p);
      const double rc = lnorm(Mf, pc) / lnorm(f, pc);
      auto where = [&](const char* which) {
        return nlohmann::json{{"N", N}, {"case", c}, {"exponent", which}};
      };
      at_p.offer(rp, [&] { return where("p"); });
      at_pc.offer(rc, [&] { return where("p'"); });
      best.offer(rp, [&] { return where("p"); });
      best.offer(rc, [&] { return where("p'"); });
    }
    pts_p.push_back({N, at_p.result()});
    pts_pc.push_back({N, at_pc.result()});
    pts.push_back({N, std::max(at_p.result(), at_pc.result())});
  }
  r.resolutions = pts;
  r.measured_constant = pts.back().value;
  r.argmax = best.where;
  r.details["ratio_p"] = points_json(pts_p);
  r.details["ratio_conjugate"] = points_json(pts_pc);
  r.pass = bounded(pts_p, s.stability_tol) && bounded(pts_pc, s.stability_tol);
  return r;
}

}  // namespace harness

/// Runs one experiment. Precondition violations produce an error report.
inline ExperimentReport run_experiment(const ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport r;
  try {
    harness::require(!spec.resolutions.empty(), "experiment: no resolutions");
    harness::require(std::is_sorted(spec.resolutions.begin(), spec.resolutions.end()),
                     "experiment: resolutions must be ascending");
    harness::require(spec.cases >= 1, "experiment: cases must be ≥ 1");
    switch (spec.kind) {
      case ExperimentKind::holder_integral: r = harness::holder_integral(spec); break;
      case ExperimentKind::holder_product: r = harness::holder_product(spec); break;
      case ExperimentKind::holder_orlicz: r = harness::holder_orlicz(spec); break;
      case ExperimentKind::char_norm_equiv: r = harness::char_norm_equiv(spec); break;
      case ExperimentKind::weight_identity: r = harness::weight_identity(spec); break;
      case ExperimentKind::kolmogorov: r = harness::kolmogorov(spec); break;
      case ExperimentKind::maximal_chain: r = harness::maximal_chain(spec); break;
      case ExperimentKind::expL_avg_bound: r = harness::expL_avg_bound(spec); break;
      case ExperimentKind::pointwise_sharp: r = harness::pointwise_sharp(spec); break;
      case ExperimentKind::sharp_norm_bound: r = harness::sharp_norm_bound(spec); break;
      case ExperimentKind::thm31_domination: r = harness::thm31_domination(spec); break;
      case ExperimentKind::thm31_ratio: r = harness::commutator_ratio(spec, false); break;
      case ExperimentKind::thm32_ratio: r = harness::commutator_ratio(spec, true); break;
      case ExperimentKind::frac_bound: r = harness::frac_bound(spec); break;
      case ExperimentKind::maximal_bound_trend: r = harness::maximal_bound_trend(spec); break;
    }
  } catch (const std::exception& e) {
    r = ExperimentReport{};
    r.status = "error";
    r.pass = false;
    r.details["error"] = e.what();
  }
  r.kind = spec.kind;
  r.seed = spec.seed;
  r.params = to_json(spec);
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

/// Runs every spec; reports come back in input order whatever the parallelism.
inline std::vector<ExperimentReport> run_suite(const std::vector<ExperimentSpec>& specs, int parallelism = 1) {
  std::vector<ExperimentReport> out(specs.size());
  const int workers = std::max(1, std::min<int>(parallelism, static_cast<int>(specs.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < specs.size(); ++i) out[i] = run_experiment(specs[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < specs.size(); i = next++) out[i] = run_experiment(specs[i]);
    });
  for (auto& t : pool) t.join();
  return out;
}

inline bool aggregate_pass(const std::vector<ExperimentReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
}

inline void write_jsonl(const std::vector<ExperimentReport>& reports, std::ostream& os) {
  for (const auto& r : reports) os << to_json(r).dump() << '\n';
}

inline void write_summary_csv(const std::vector<ExperimentReport>& reports, std::ostream& os) {
  os << "kind,measured,bound,pass,status,resolutions\n";
  os.precision(17);
  for (const auto& r : reports) {
    os << to_string(r.kind) << ',' << r.measured_constant << ',';
    if (r.asserted_bound) os << *r.asserted_bound;
    os << ',' << (r.pass ? "true" : "false") << ',' << r.status << ',';
    for (std::size_t i = 0; i < r.resolutions.size(); ++i)
      os << (i ? ";" : "") << r.resolutions[i].N << ':' << r.resolutions[i].value;
    os << '\n';
  }
}

}  // namespace vexan
