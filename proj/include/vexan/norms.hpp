/**
 * @file norms.hpp
 * @brief Modulars, Luxemburg norms, Orlicz cube averages and weak-L^q norms.
 *
 * All Luxemburg-type quantities are "least η with F(η) ≤ 1" for a continuous,
 * strictly decreasing F. They share one root finder that keeps a bracket
 * [lo, hi] with F(hi) ≤ 1 < F(lo) and returns hi, so the modular at the
 * returned value never exceeds one.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vexan/discretize.hpp"
#include "vexan/exponent.hpp"

namespace vexan {

inline constexpr double kDefaultTol = 1e-10;

struct NormResult {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double modular_at_value = 0.0;
};

namespace detail {

struct LevelEval {
  double value;       // F(e^s)
  double derivative;  // dF/ds
};

/// Least η = e^s with F(η) ≤ 1, for F continuous and strictly decreasing in s.
/// `eval(s)` returns F and dF/ds. Safeguarded Newton on ln F inside a bracket
/// that is always maintained; the bracket closes to tol/8 relative width.
template <class Eval>
NormResult solve_unit_level(Eval&& eval, double start, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("norm: tol must be positive");
  if (!(start > 0.0) || !std::isfinite(start)) start = 1.0;
  const double width = -std::log1p(-tol / 8.0);  // s-width giving (hi-lo)/hi ≤ tol/8
  auto checked = [&](double s) {
    LevelEval e = eval(s);
    if (std::isnan(e.value)) throw std::overflow_error("norm: modular evaluation overflowed");
    return e;
  };

  double s = std::log(start);
  LevelEval cur = checked(s);
  double s_lo, s_hi, f_hi;
  LevelEval at_lo{}, at_hi{};
  const double step = std::numbers::ln2;
  int guard = 0;
  if (cur.value > 1.0) {
    s_lo = s;
    at_lo = cur;
    for (;;) {
      s += step;
      cur = checked(s);
      if (cur.value <= 1.0) break;
      s_lo = s;
      at_lo = cur;
      if (++guard > 3000) throw std::runtime_error("norm: failed to bracket from below");
    }
    s_hi = s;
    at_hi = cur;
  } else {
    s_hi = s;
    at_hi = cur;
    for (;;) {
      s -= step;
      cur = checked(s);
      if (cur.value > 1.0) break;
      s_hi = s;
      at_hi = cur;
      if (++guard > 3000) throw std::runtime_error("norm: failed to bracket from above");
    }
    s_lo = s;
    at_lo = cur;
  }
  f_hi = at_hi.value;

  LevelEval last = cur;
  double s_last = s;
  int newton_budget = 60;
  for (int it = 0; s_hi - s_lo > width; ++it) {
    if (it > 400) throw std::runtime_error("norm: root finder did not converge");
    double s_new = 0.5 * (s_lo + s_hi);
    if (newton_budget > 0 && last.value > 0.0 && std::isfinite(last.value) &&
        std::isfinite(last.derivative) && last.derivative < 0.0) {
      --newton_budget;
      const double g = std::log(last.value);
      const double gp = last.derivative / last.value;
      double cand = s_last - g / gp;
      const double dstep = cand - s_last;
      if (std::abs(dstep) < 0.25 * width) cand = s_last + (dstep >= 0 ? 0.25 : -0.25) * width;
      if (cand > s_lo && cand < s_hi) s_new = cand;
    }
    LevelEval e = checked(s_new);
    if (e.value <= 1.0) {
      s_hi = s_new;
      f_hi = e.value;
    } else {
      s_lo = s_new;
    }
    last = e;
    s_last = s_new;
  }
  const double hi = std::exp(s_hi);
  return NormResult{hi, std::exp(s_lo), hi, f_hi};
}

inline void require_finite(std::span<const double> v, const char* who) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::domain_error(std::string(who) + ": non-finite sample");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Variable-exponent modular and Luxemburg norm

/// ∫ |w f|^{p(x)} dx on sampled exponent values.
inline double modular(std::span<const double> f, std::span<const double> p, double cell_volume,
                      std::span<const double> w = {}) {
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double a = std::abs(w.empty() ? f[k] : w[k] * f[k]);
    if (a > 0.0) s += std::pow(a, p[k]);
  }
  return s * cell_volume;
}

inline double modular(const GridFunction& f, const ExponentField& p) {
  const auto ps = sample_exponent(p, f.grid());
  return modular(f.values(), ps.values(), f.grid().cell_volume());
}

inline double modular(const GridFunction& f, const ExponentField& p, const GridFunction& w) {
  if (!(w.grid() == f.grid())) throw std::invalid_argument("modular: weight grid mismatch");
  for (double x : w.values())
    if (!(x > 0.0)) throw std::domain_error("modular: weight must be strictly positive");
  const auto ps = sample_exponent(p, f.grid());
  return modular(f.values(), ps.values(), f.grid().cell_volume(), w.values());
}

/// Luxemburg norm on sampled data (exponent samples aligned with f).
inline NormResult luxemburg_norm(std::span<const double> f, std::span<const double> p,
                                 double cell_volume, double domain_volume, double tol = kDefaultTol) {
  detail::require_finite(f, "luxemburg_norm");
  std::vector<double> logs, exps;
  double fmax = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double a = std::abs(f[k]);
    if (a > 0.0) {
      logs.push_back(std::log(a));
      exps.push_back(p[k]);
      fmax = std::max(fmax, a);
    }
  }
  if (logs.empty()) return {};
  auto eval = [&](double s) {
    double v = 0.0, d = 0.0;
    for (std::size_t k = 0; k < logs.size(); ++k) {
      const double t = std::exp(exps[k] * (logs[k] - s));
      v += t;
      d -= exps[k] * t;
    }
    return detail::LevelEval{v * cell_volume, d * cell_volume};
  };
  return detail::solve_unit_level(eval, fmax * (domain_volume + 1.0), tol);
}

inline NormResult luxemburg_norm(const GridFunction& f, const ExponentField& p,
                                 double tol = kDefaultTol) {
  const auto ps = sample_exponent(p, f.grid());
  return luxemburg_norm(f.values(), ps.values(), f.grid().cell_volume(),
                        f.grid().domain().volume(), tol);
}

/// Weighted norm ‖f‖_{L^p_w} = ‖w f‖_p, w strictly positive.
inline NormResult luxemburg_norm(const GridFunction& f, const ExponentField& p, double tol,
                                 const GridFunction& w) {
  for (double x : w.values())
    if (!(x > 0.0)) throw std::domain_error("luxemburg_norm: weight must be strictly positive");
  return luxemburg_norm(w * f, p, tol);
}

/// Convenience: the norm value only.
inline double lnorm(const GridFunction& f, const ExponentField& p, double tol = kDefaultTol) {
  return luxemburg_norm(f, p, tol).value;
}

/// Classical (∫_Q |f|^p)^{1/p} for a constant exponent p > 0.
inline double lebesgue_norm(const GridFunction& f, const Cube& q, double p) {
  double s = 0.0;
  for_each_cell(f.grid(), q, [&](std::size_t k) { s += std::pow(std::abs(f[k]), p); });
  return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

// ---------------------------------------------------------------------------
// Characteristic-function norms

/// ‖χ_Q‖_{p(·)} from sampled exponent values on the cells of Q (or any
/// weighted cell list: volumes[k] = |cell_k ∩ Q|).
inline NormResult char_norm_cells(std::span<const double> p_on_q, std::span<const double> volumes,
                                  double tol = kDefaultTol) {
  double vol = 0.0, inv_mean = 0.0;
  for (std::size_t k = 0; k < p_on_q.size(); ++k) {
    vol += volumes[k];
    inv_mean += volumes[k] / p_on_q[k];
  }
  if (!(vol > 0.0)) return {};
  inv_mean /= vol;
  auto eval = [&](double s) {
    double v = 0.0, d = 0.0;
    for (std::size_t k = 0; k < p_on_q.size(); ++k) {
      const double t = volumes[k] * std::exp(-p_on_q[k] * s);
      v += t;
      d -= p_on_q[k] * t;
    }
    return detail::LevelEval{v, d};
  };
  return detail::solve_unit_level(eval, std::exp(std::log(vol) * inv_mean), tol);
}

inline double char_norm(const GridFunction& p_samples, const Cube& q, double tol = kDefaultTol) {
  const auto ps = cube_values(p_samples, q);
  const std::vector<double> vols(ps.size(), p_samples.grid().cell_volume());
  return char_norm_cells(ps, vols, tol).value;
}

inline double char_norm(const ExponentField& p, const Cube& q, const UniformGrid& g,
                        double tol = kDefaultTol) {
  return char_norm(sample_exponent(p, g), q, tol);
}

/// ‖χ_Q‖ for an arbitrary centred cube, clipped to the domain.
inline double char_norm(const GridFunction& p_samples, const GeomCube& q, double tol = kDefaultTol) {
  std::vector<double> ps, vols;
  for (const auto& cw : overlap_weights(p_samples.grid(), q)) {
    ps.push_back(p_samples[cw.cell]);
    vols.push_back(cw.volume);
  }
  return char_norm_cells(ps, vols, tol).value;
}

/// ‖χ_Q‖_{p(·)} for every cube in `cubes`, same order.
inline std::vector<double> char_norms(const GridFunction& p_samples, const std::vector<Cube>& cubes,
                                      double tol = kDefaultTol) {
  std::vector<double> out;
  out.reserve(cubes.size());
  for (const Cube& q : cubes) out.push_back(char_norm(p_samples, q, tol));
  return out;
}

/// Harmonic mean exponent p_Q: 1/p_Q = |Q|^{-1} ∫_Q 1/p.
inline double harmonic_mean(const GridFunction& p_samples, const Cube& q) {
  double s = 0.0;
  for_each_cell(p_samples.grid(), q, [&](std::size_t k) { s += 1.0 / p_samples[k]; });
  return static_cast<double>(q.cell_count(p_samples.grid().dim())) / s;
}

// ---------------------------------------------------------------------------
// Orlicz averages

enum class YoungKind { LlogL, expL, expLt };

struct YoungFunction {
  YoungKind kind = YoungKind::LlogL;
  double r = 1.0;  // log power for LlogL, t power for expLt

  /// t·ln(e+t)^r
  static YoungFunction llogl(double r = 1.0) {
    if (!(r > 0.0)) throw std::invalid_argument("L(log L)^r: r must be positive");
    return {YoungKind::LlogL, r};
  }
  static YoungFunction expl() { return {YoungKind::expL, 1.0}; }
  static YoungFunction explt(double r) {
    if (!(r >= 1.0)) throw std::invalid_argument("exp L^r: r must be ≥ 1");
    return {YoungKind::expLt, r};
  }

  double operator()(double t) const {
    switch (kind) {
      case YoungKind::LlogL: {
        const double l = std::log(std::numbers::e + t);
        return t * (r == 1.0 ? l : std::pow(l, r));
      }
      case YoungKind::expL: return std::expm1(t);
      case YoungKind::expLt: return std::expm1(std::pow(t, r));
    }
    return 0.0;
  }

  /// t·Φ'(t)
  double t_derivative(double t) const {
    switch (kind) {
      case YoungKind::LlogL: {
        const double l = std::log(std::numbers::e + t);
        return t * std::pow(l, r - 1.0) * (l + r * t / (std::numbers::e + t));
      }
      case YoungKind::expL: return t * std::exp(t);
      case YoungKind::expLt: {
        const double tr = std::pow(t, r);
        return r * tr * std::exp(tr);
      }
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind) {
      case YoungKind::LlogL: return r == 1.0 ? "LlogL" : "LlogL^" + std::to_string(r);
      case YoungKind::expL: return "expL";
      case YoungKind::expLt: return "expL^" + std::to_string(r);
    }
    return "?";
  }
};

/// Least λ with mean_Q Φ(|f|/λ) ≤ 1, from the values of f on the cells of Q.
inline double orlicz_average(std::span<const double> values, const YoungFunction& phi,
                             double tol = kDefaultTol) {
  detail::require_finite(values, "orlicz_cube_average");
  std::vector<double> a;
  a.reserve(values.size());
  double amax = 0.0;
  for (double v : values) {
    const double x = std::abs(v);
    if (x > 0.0) a.push_back(x);
    amax = std::max(amax, x);
  }
  if (a.empty()) return 0.0;
  const double inv_count = 1.0 / static_cast<double>(values.size());
  auto eval = [&](double s) {
    const double inv = std::exp(-s);
    double v = 0.0, d = 0.0;
    for (double x : a) {
      const double t = x * inv;
      v += phi(t);
      d -= phi.t_derivative(t);
    }
    if (std::isinf(v)) return detail::LevelEval{std::numeric_limits<double>::infinity(), -1.0};
    return detail::LevelEval{v * inv_count, d * inv_count};
  };
  return detail::solve_unit_level(eval, amax, tol).value;
}

inline double orlicz_cube_average(const GridFunction& f, const Cube& q, const YoungFunction& phi,
                                  double tol = kDefaultTol) {
  return orlicz_average(cube_values(f, q), phi, tol);
}

// ---------------------------------------------------------------------------
// Weak Lebesgue norm

inline constexpr double kWeakThresholdOffset = 1e-12;

/// sup_t t·|{x ∈ Q : |f(x)| > t}|^{1/q}, sampled at t = (data value) − 1e-12.
inline double weak_lebesgue_norm(const GridFunction& f, const Cube& q, double exponent) {
  if (!(exponent > 0.0)) throw std::invalid_argument("weak_lebesgue_norm: q must be positive");
  auto v = cube_values(f, q);
  for (double& x : v) x = std::abs(x);
  std::sort(v.begin(), v.end(), std::greater<>());
  const double cell = f.grid().cell_volume();
  double best = 0.0;
  std::size_t count = 0;  // values strictly greater than the current threshold
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double t = v[i] - kWeakThresholdOffset;
    if (!(t > 0.0)) break;
    while (count < v.size() && v[count] > t) ++count;
    best = std::max(best, t * std::pow(static_cast<double>(count) * cell, 1.0 / exponent));
  }
  return best;
}

}  // namespace vexan
