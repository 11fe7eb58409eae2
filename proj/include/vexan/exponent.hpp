/**
 * @file exponent.hpp
 * @brief Closed-form variable exponents p(·) and their class diagnostics.
 *
 * An ExponentField is an immutable expression tree. Leaves are the primitive
 * families (constant, log-perturbed, bump, smoothed radial step); interior
 * nodes are the algebra the theory needs: conjugation p' = p/(p-1),
 * harmonic combination 1/p = Σ 1/p_j, shifts 1/q = 1/p - δ/n, scaling s·p and
 * affine maps of the reciprocal a + b/p (e.g. δ(·) = n/β - n/r(·)).
 *
 * Every node knows a conservative analytic range and its limit at infinity,
 * so preconditions are checked without a grid.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vexan/discretize.hpp"

namespace vexan {

enum class ExponentKind {
  constant,        // [c]
  log_perturbed,   // [p0, c]: p0 + c / ln(e + |x|)
  bump,            // [base, height, radius, cx, cy]: base + height·φ(|x - c| / radius)
  radial_step,     // [inner, outer, radius, width]: smoothed jump at |x| = radius
  clamped_affine,  // [c0, c1, c2, lo, hi]: clamp(c0 + c1·x + c2·y, lo, hi)
  conjugate,       // child' = child / (child - 1)
  harmonic,        // 1 / Σ 1/child_j
  shifted,         // [n]: 1 / (1/child_0 - child_1/n)
  scaled,          // [s]: s·child
  affine_reciprocal  // [a, b]: a + b / child
};

inline const char* to_string(ExponentKind k) {
  switch (k) {
    case ExponentKind::constant: return "constant";
    case ExponentKind::log_perturbed: return "log_perturbed";
    case ExponentKind::bump: return "bump";
    case ExponentKind::radial_step: return "radial_step";
    case ExponentKind::clamped_affine: return "clamped_affine";
    case ExponentKind::conjugate: return "conjugate";
    case ExponentKind::harmonic: return "harmonic";
    case ExponentKind::shifted: return "shifted";
    case ExponentKind::scaled: return "scaled";
    case ExponentKind::affine_reciprocal: return "affine_reciprocal";
  }
  return "?";
}

/// Smooth bump profile: 1 at t = 0, vanishing with all derivatives at |t| = 1.
inline double bump_profile(double t) {
  const double a = std::abs(t);
  if (a >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - a * a));
}

class ExponentField {
 public:
  struct Range {
    double lo;
    double hi;
  };

  static ExponentField constant(double c, int dim = 1) {
    return ExponentField(ExponentKind::constant, {c}, {}, dim);
  }
  static ExponentField log_perturbed(double base, double amplitude, int dim = 1) {
    return ExponentField(ExponentKind::log_perturbed, {base, amplitude}, {}, dim);
  }
  static ExponentField bump(double base, double height, double radius, Point center = {0, 0},
                            int dim = 1) {
    if (!(radius > 0.0)) throw std::invalid_argument("bump exponent: radius must be positive");
    return ExponentField(ExponentKind::bump, {base, height, radius, center[0], center[1]}, {}, dim);
  }
  /// width = 0 gives the discontinuous step (a diagnostic input, not C^log).
  static ExponentField radial_step(double inner, double outer, double radius, double width,
                                   int dim = 1) {
    if (width < 0.0) throw std::invalid_argument("radial_step exponent: negative width");
    return ExponentField(ExponentKind::radial_step, {inner, outer, radius, width}, {}, dim);
  }

  /// No limit at infinity unless the slope vanishes; outside C^log_∞ in general.
  static ExponentField clamped_affine(double c0, double c1, double c2, double lo, double hi,
                                      int dim = 1) {
    if (!(lo <= hi)) throw std::invalid_argument("clamped_affine exponent: need lo ≤ hi");
    return ExponentField(ExponentKind::clamped_affine, {c0, c1, c2, lo, hi}, {}, dim);
  }

  /// Builds a primitive from a kind name and a parameter list (config files).
  static ExponentField from_params(const std::string& kind, const std::vector<double>& p, int dim) {
    auto need = [&](std::size_t lo, std::size_t hi) {
      if (p.size() < lo || p.size() > hi)
        throw std::invalid_argument("exponent '" + kind + "': wrong number of params");
    };
    if (dim != 1 && dim != 2) throw std::invalid_argument("exponent: dim must be 1 or 2");
    if (kind == "constant") {
      need(1, 1);
      return constant(p[0], dim);
    }
    if (kind == "log_perturbed") {
      need(2, 2);
      return log_perturbed(p[0], p[1], dim);
    }
    if (kind == "bump") {
      need(3, 5);
      Point c{p.size() > 3 ? p[3] : 0.0, p.size() > 4 ? p[4] : 0.0};
      return bump(p[0], p[1], p[2], c, dim);
    }
    if (kind == "radial_step") {
      need(4, 4);
      return radial_step(p[0], p[1], p[2], p[3], dim);
    }
    if (kind == "clamped_affine") {
      need(5, 5);
      return clamped_affine(p[0], p[1], p[2], p[3], p[4], dim);
    }
    throw std::invalid_argument("unknown exponent kind '" + kind + "'");
  }

  ExponentKind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<ExponentField>& children() const { return children_; }
  int dim() const { return dim_; }

  double operator()(const Point& x) const {
    switch (kind_) {
      case ExponentKind::constant:
        return params_[0];
      case ExponentKind::log_perturbed:
        return params_[0] + params_[1] / std::log(std::numbers::e + norm(x, dim_));
      case ExponentKind::bump: {
        const double r = distance(x, Point{params_[3], params_[4]}, dim_);
        return params_[0] + params_[1] * bump_profile(r / params_[2]);
      }
      case ExponentKind::radial_step: {
        const double r = norm(x, dim_);
        const double w = params_[3];
        const double s = w > 0.0 ? 0.5 * (1.0 + std::tanh((r - params_[2]) / w))
                                 : (r < params_[2] ? 0.0 : 1.0);
        return params_[0] + (params_[1] - params_[0]) * s;
      }
      case ExponentKind::clamped_affine: {
        const double v = params_[0] + params_[1] * x[0] + (dim_ > 1 ? params_[2] * x[1] : 0.0);
        return std::clamp(v, params_[3], params_[4]);
      }
      case ExponentKind::conjugate: {
        const double q = children_[0](x);
        return q / (q - 1.0);
      }
      case ExponentKind::harmonic: {
        double inv = 0.0;
        for (const auto& c : children_) inv += 1.0 / c(x);
        return 1.0 / inv;
      }
      case ExponentKind::shifted:
        return 1.0 / (1.0 / children_[0](x) - children_[1](x) / params_[0]);
      case ExponentKind::scaled:
        return params_[0] * children_[0](x);
      case ExponentKind::affine_reciprocal:
        return params_[0] + params_[1] / children_[0](x);
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  /// Analytic lim_{|x|→∞} p(x).
  double limit_at_infinity() const {
    switch (kind_) {
      case ExponentKind::constant:
      case ExponentKind::log_perturbed:
      case ExponentKind::bump:
        return params_[0];
      case ExponentKind::radial_step:
        return params_[1];
      case ExponentKind::clamped_affine:
        if (params_[1] == 0.0 && (dim_ == 1 || params_[2] == 0.0)) return std::clamp(params_[0], params_[3], params_[4]);
        return std::numeric_limits<double>::quiet_NaN();
      case ExponentKind::conjugate: {
        const double q = children_[0].limit_at_infinity();
        return q / (q - 1.0);
      }
      case ExponentKind::harmonic: {
        double inv = 0.0;
        for (const auto& c : children_) inv += 1.0 / c.limit_at_infinity();
        return 1.0 / inv;
      }
      case ExponentKind::shifted:
        return 1.0 / (1.0 / children_[0].limit_at_infinity() -
                      children_[1].limit_at_infinity() / params_[0]);
      case ExponentKind::scaled:
        return params_[0] * children_[0].limit_at_infinity();
      case ExponentKind::affine_reciprocal:
        return params_[0] + params_[1] / children_[0].limit_at_infinity();
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  /// Conservative enclosure of the values over all of R^n. Exact for the
  /// primitives; interval arithmetic for derived nodes.
  Range range() const {
    switch (kind_) {
      case ExponentKind::constant:
        return {params_[0], params_[0]};
      case ExponentKind::log_perturbed:
      case ExponentKind::bump:
        return {std::min(params_[0], params_[0] + params_[1]),
                std::max(params_[0], params_[0] + params_[1])};
      case ExponentKind::radial_step:
        return {std::min(params_[0], params_[1]), std::max(params_[0], params_[1])};
      case ExponentKind::clamped_affine:
        return {params_[3], params_[4]};
      case ExponentKind::conjugate: {
        const Range r = children_[0].range();
        return {r.hi / (r.hi - 1.0), r.lo / (r.lo - 1.0)};
      }
      case ExponentKind::harmonic: {
        double inv_lo = 0.0, inv_hi = 0.0;
        for (const auto& c : children_) {
          const Range r = c.range();
          inv_lo += 1.0 / r.hi;
          inv_hi += 1.0 / r.lo;
        }
        return {1.0 / inv_hi, 1.0 / inv_lo};
      }
      case ExponentKind::shifted: {
        const Range p = children_[0].range();
        const Range d = children_[1].range();
        const double n = params_[0];
        return {1.0 / (1.0 / p.lo - d.lo / n), 1.0 / (1.0 / p.hi - d.hi / n)};
      }
      case ExponentKind::scaled: {
        const Range r = children_[0].range();
        return {params_[0] * r.lo, params_[0] * r.hi};
      }
      case ExponentKind::affine_reciprocal: {
        const Range r = children_[0].range();
        const double a = params_[0] + params_[1] / r.lo;
        const double b = params_[0] + params_[1] / r.hi;
        return {std::min(a, b), std::max(a, b)};
      }
    }
    return {0.0, 0.0};
  }

  /// Internal constructor for derived nodes; use the free functions below.
  ExponentField(ExponentKind kind, std::vector<double> params, std::vector<ExponentField> children,
                int dim)
      : kind_(kind), params_(std::move(params)), children_(std::move(children)), dim_(dim) {
    if (dim_ != 1 && dim_ != 2) throw std::invalid_argument("exponent: dim must be 1 or 2");
    for (double p : params_)
      if (!std::isfinite(p)) throw std::invalid_argument("exponent: non-finite parameter");
    if (children_.empty() && kind_ != ExponentKind::affine_reciprocal) {
      const Range r = range();
      if (!(r.lo > 0.0) || !std::isfinite(r.hi))
        throw std::invalid_argument(std::string("exponent '") + to_string(kind_) +
                                    "': values must lie in (0, ∞)");
    }
  }

 private:
  ExponentKind kind_ = ExponentKind::constant;
  std::vector<double> params_{1.0};
  std::vector<ExponentField> children_{};
  int dim_ = 1;
};

inline double eval_exponent(const ExponentField& p, const Point& x) { return p(x); }

/// Pointwise conjugate index q' = q/(q-1). Requires p_- > 1.
inline ExponentField conjugate(const ExponentField& p) {
  if (!(p.range().lo > 1.0))
    throw std::domain_error("conjugate: exponent must satisfy p_- > 1");
  return ExponentField(ExponentKind::conjugate, {}, {p}, p.dim());
}

/// 1/p = Σ_j 1/p_j. A single field is returned unchanged.
inline ExponentField harmonic_combine(const std::vector<ExponentField>& fields) {
  if (fields.empty()) throw std::invalid_argument("harmonic_combine: no fields");
  for (const auto& f : fields)
    if (f.dim() != fields.front().dim())
      throw std::invalid_argument("harmonic_combine: dimension mismatch");
  if (fields.size() == 1) return fields.front();
  return ExponentField(ExponentKind::harmonic, {}, fields, fields.front().dim());
}

/// q with 1/q = 1/p - δ/n. Zero shift returns p itself.
inline ExponentField delta_shift(const ExponentField& p, const ExponentField& delta, int n) {
  if (delta.dim() != p.dim()) throw std::invalid_argument("delta_shift: dimension mismatch");
  const auto d = delta.range();
  if (d.lo == 0.0 && d.hi == 0.0) return p;
  const auto r = p.range();
  // 1/q attains its minimum at the largest p and largest δ (conservatively).
  const double inv_min = 1.0 / r.hi - d.hi / n;
  const double inv_max = 1.0 / r.lo - d.lo / n;
  if (!(inv_min > 0.0) || !std::isfinite(1.0 / inv_min) || !(inv_max > 0.0))
    throw std::domain_error("delta_shift: 1/p - δ/n must stay positive");
  return ExponentField(ExponentKind::shifted, {static_cast<double>(n)}, {p, delta}, p.dim());
}

inline ExponentField delta_shift(const ExponentField& p, double delta, int n) {
  if (delta < 0.0) throw std::domain_error("delta_shift: negative δ");
  if (delta == 0.0) return p;
  return delta_shift(p, ExponentField::constant(delta, p.dim()), n);
}

inline ExponentField scale(const ExponentField& p, double s) {
  if (!(s > 0.0)) throw std::domain_error("scale: factor must be positive");
  return ExponentField(ExponentKind::scaled, {s}, {p}, p.dim());
}

/// a + b/p(·); e.g. δ(·) = n/β - n/r(·) is affine_reciprocal(r, n/β, -n).
inline ExponentField affine_reciprocal(const ExponentField& p, double a, double b) {
  return ExponentField(ExponentKind::affine_reciprocal, {a, b}, {p}, p.dim());
}

/// δ(·) with δ(·)/n = 1/β - 1/r(·).
inline ExponentField lipschitz_order(const ExponentField& r, double beta, int n) {
  return affine_reciprocal(r, n / beta, -static_cast<double>(n));
}

inline GridFunction sample_exponent(const ExponentField& p, const UniformGrid& g) {
  if (p.dim() != g.dim()) throw std::invalid_argument("sample_exponent: dimension mismatch");
  return GridFunction::sample(g, [&](const Point& x) { return p(x); });
}

struct ExponentBounds {
  double p_minus;
  double p_plus;
  double p_inf;
  std::optional<double> conj_minus;  // (p')_- = p_+/(p_+ - 1), when p_- > 1
  std::optional<double> conj_plus;   // (p')_+ = p_-/(p_- - 1), when p_- > 1
};

/// Grid min/max stand in for ess inf / ess sup; p_inf is analytic.
inline ExponentBounds exponent_bounds(const ExponentField& p, const UniformGrid& g) {
  const auto s = sample_exponent(p, g);
  const auto [lo, hi] = std::minmax_element(s.values().begin(), s.values().end());
  ExponentBounds b{*lo, *hi, p.limit_at_infinity(), std::nullopt, std::nullopt};
  if (b.p_minus > 1.0) {
    b.conj_plus = b.p_minus / (b.p_minus - 1.0);
    b.conj_minus = b.p_plus / (b.p_plus - 1.0);
  }
  return b;
}

struct LogHolderConstants {
  double c_loc;  // max |p(x)-p(y)|·ln(1/|x-y|) over node pairs with 0 < |x-y| ≤ 1/2
  double c_inf;  // max |p(x)-p_∞|·ln(e+|x|) over nodes
};

/// Log-Hölder constants of an arbitrary closed-form function on the grid nodes.
template <class F>
LogHolderConstants log_holder_constants(F&& fn, double limit, const UniformGrid& g) {
  if (g.size() < 2) throw std::invalid_argument("log_holder_constants: need ≥ 2 nodes");
  const auto s = GridFunction::sample(g, fn);
  const int n = g.points_per_axis();
  const double h = g.spacing();
  const int reach = static_cast<int>(std::floor(0.5 / h + 1e-12));
  double c_loc = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Index a = g.unflat(k);
    const int jlo = g.dim() == 2 ? -reach : 0;
    const int jhi = g.dim() == 2 ? reach : 0;
    for (int di = 0; di <= reach; ++di) {
      for (int dj = jlo; dj <= jhi; ++dj) {
        if (di == 0 && dj <= 0) continue;  // each unordered pair once
        const Index b{a[0] + di, a[1] + dj};
        if (b[0] >= n || b[1] < 0 || (g.dim() == 2 && b[1] >= n)) continue;
        const double dist = h * std::hypot(static_cast<double>(di), static_cast<double>(dj));
        if (dist > 0.5 + 1e-12) continue;
        const double diff = std::abs(s[k] - s[g.flat(b)]);
        c_loc = std::max(c_loc, diff * std::log(1.0 / dist));
      }
    }
  }
  double c_inf = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double r = norm(g.node(k), g.dim());
    c_inf = std::max(c_inf, std::abs(s[k] - limit) * std::log(std::numbers::e + r));
  }
  return {c_loc, c_inf};
}

inline LogHolderConstants log_holder_constants(const ExponentField& p, const UniformGrid& g) {
  return log_holder_constants([&](const Point& x) { return p(x); }, p.limit_at_infinity(), g);
}

}  // namespace vexan
