/**
 * @file maximal.hpp
 * @brief Maximal-type operators: Hardy–Littlewood, M_ε, fractional L log L,
 *        sharp maximal functions and the multilinear maximal functions.
 *
 * Every operator is a supremum over the cubes of a CubeFamily that contain
 * the output node. The common driver evaluates one scalar per cube and
 * scatters it, with max, into the cells the cube covers.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vexan/discretize.hpp"
#include "vexan/exponent.hpp"
#include "vexan/norms.hpp"

namespace vexan {

/// out(x) = max over cubes Q ∋ x of value(Q, index of Q). Values must be ≥ 0.
template <class PerCube>
GridFunction sup_over_cubes(const UniformGrid& g, const std::vector<Cube>& cubes, PerCube&& value) {
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t c = 0; c < cubes.size(); ++c) {
    const double v = value(cubes[c], c);
    for_each_cell(g, cubes[c], [&](std::size_t k) { out[k] = std::max(out[k], v); });
  }
  return GridFunction(g, std::move(out));
}

/// |Q|^{-1} ∫_Q |v - v_Q|
inline double mean_oscillation(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double dev = 0.0;
  for (double x : v) dev += std::abs(x - mean);
  return dev / static_cast<double>(v.size());
}

inline GridFunction hl_maximal(const GridFunction& f, const CubeFamily& fam) {
  const auto a = f.abs();
  return sup_over_cubes(f.grid(), enumerate_cubes(f.grid(), fam),
                        [&](const Cube& q, std::size_t) { return cube_average(a, q); });
}

/// M_ε f = [M(|f|^ε)]^{1/ε}
inline GridFunction m_epsilon(const GridFunction& f, double eps, const CubeFamily& fam) {
  if (!(eps > 0.0)) throw std::invalid_argument("m_epsilon: ε must be positive");
  if (eps == 1.0) return hl_maximal(f, fam);
  const auto powered = f.map([eps](double x) { return std::pow(std::abs(x), eps); });
  return hl_maximal(powered, fam).map([eps](double x) { return std::pow(x, 1.0 / eps); });
}

/// sup_{Q∋x} |Q|^{α/n} ‖f‖_{L log L, Q}
inline GridFunction m_alpha_llogl(const GridFunction& f, double alpha, const CubeFamily& fam,
                                  double tol = kDefaultTol) {
  const int n = f.grid().dim();
  if (!(alpha >= 0.0 && alpha < n)) throw std::invalid_argument("m_alpha_llogl: need 0 ≤ α < n");
  const auto& g = f.grid();
  const auto phi = YoungFunction::llogl();
  return sup_over_cubes(g, enumerate_cubes(g, fam), [&](const Cube& q, std::size_t) {
    const double avg = orlicz_cube_average(f, q, phi, tol);
    return alpha == 0.0 ? avg : std::pow(q.volume(g), alpha / n) * avg;
  });
}

/// f^♯_δ(x) = sup_{Q∋x} |Q|^{-1-δ/n} ∫_Q |f - f_Q|
inline GridFunction sharp_maximal(const GridFunction& f, double delta, const CubeFamily& fam) {
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("sharp_maximal: need 0 ≤ δ < 1");
  const auto& g = f.grid();
  const int n = g.dim();
  return sup_over_cubes(g, enumerate_cubes(g, fam), [&](const Cube& q, std::size_t) {
    const double osc = mean_oscillation(cube_values(f, q));
    return delta == 0.0 ? osc : osc * std::pow(q.volume(g), -delta / n);
  });
}

/// a(Q) = |Q|^{1/β-1} ‖χ_Q‖_{p'(·)} for every cube in `cubes`.
inline std::vector<double> variable_sharp_prefactors(const ExponentField& p, double beta,
                                                     const UniformGrid& g,
                                                     const std::vector<Cube>& cubes,
                                                     double tol = kDefaultTol) {
  const auto conj = sample_exponent(conjugate(p), g);
  auto norms = char_norms(conj, cubes, tol);
  for (std::size_t c = 0; c < cubes.size(); ++c)
    norms[c] *= std::pow(cubes[c].volume(g), 1.0 / beta - 1.0);
  return norms;
}

inline void check_variable_sharp_params(const ExponentField& p, double beta, double gamma,
                                        const UniformGrid& g) {
  const auto b = exponent_bounds(p, g);
  if (!(beta > 1.0 && beta <= b.p_minus + 1e-12))
    throw std::invalid_argument("sharp_maximal_var: need 1 < β ≤ p_-");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("sharp_maximal_var: need 0 < γ ≤ 1");
}

/// f^♯_{δ(·),γ}(x) with precomputed prefactors a(Q) aligned with `cubes`.
inline GridFunction sharp_maximal_var(const GridFunction& f, double gamma,
                                      const std::vector<Cube>& cubes,
                                      std::span<const double> prefactors) {
  const auto& g = f.grid();
  const auto fg = gamma == 1.0 ? f : f.map([gamma](double x) { return std::pow(std::abs(x), gamma); });
  return sup_over_cubes(g, cubes, [&](const Cube& q, std::size_t c) {
    const double osc = mean_oscillation(cube_values(fg, q));
    return (gamma == 1.0 ? osc : std::pow(osc, 1.0 / gamma)) / prefactors[c];
  });
}

/// f^♯_{δ(·),γ}(x) = sup_{Q∋x} a(Q)^{-1} (|Q|^{-1}∫_Q ||f|^γ - (|f|^γ)_Q|)^{1/γ},
/// a(Q) = |Q|^{1/β-1}‖χ_Q‖_{p'(·)}. γ = 1 uses f itself (the δ(·)-sharp operator).
inline GridFunction sharp_maximal_var(const GridFunction& f, const ExponentField& p, double beta,
                                      double gamma, const CubeFamily& fam,
                                      double tol = kDefaultTol) {
  check_variable_sharp_params(p, beta, gamma, f.grid());
  const auto cubes = enumerate_cubes(f.grid(), fam);
  const auto pre = variable_sharp_prefactors(p, beta, f.grid(), cubes, tol);
  return sharp_maximal_var(f, gamma, cubes, pre);
}

// ---------------------------------------------------------------------------
// Multilinear maximal functions

namespace maximal {
struct HL {};
struct MEps {
  double eps;
};
struct MAlphaLlogL {
  double alpha;
};
struct MultiM {};
struct MultiMr {
  double r;
};
struct MultiLlogLi {
  int i;  // 1-based slot carrying the L log L average
};
struct MultiLlogL {};
}  // namespace maximal

using MaximalVariant = std::variant<maximal::HL, maximal::MEps, maximal::MAlphaLlogL, maximal::MultiM,
                                    maximal::MultiMr, maximal::MultiLlogLi, maximal::MultiLlogL>;

/// Every variant of the family; single-function variants need fs.size() == 1.
inline GridFunction multilinear_maximal(std::span<const GridFunction> fs, const MaximalVariant& variant,
                                        const CubeFamily& fam, double tol = kDefaultTol) {
  if (fs.empty()) throw std::invalid_argument("multilinear_maximal: no functions");
  if (!same_grid(fs)) throw std::invalid_argument("multilinear_maximal: mismatched grids");
  const auto& g = fs.front().grid();
  auto single = [&]() -> const GridFunction& {
    if (fs.size() != 1) throw std::invalid_argument("multilinear_maximal: variant takes one function");
    return fs.front();
  };
  const auto phi = YoungFunction::llogl();
  const auto cubes = enumerate_cubes(g, fam);

  return std::visit(
      [&](const auto& v) -> GridFunction {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, maximal::HL>) {
          return hl_maximal(single(), fam);
        } else if constexpr (std::is_same_v<V, maximal::MEps>) {
          return m_epsilon(single(), v.eps, fam);
        } else if constexpr (std::is_same_v<V, maximal::MAlphaLlogL>) {
          return m_alpha_llogl(single(), v.alpha, fam, tol);
        } else if constexpr (std::is_same_v<V, maximal::MultiM>) {
          std::vector<GridFunction> a;
          for (const auto& f : fs) a.push_back(f.abs());
          return sup_over_cubes(g, cubes, [&](const Cube& q, std::size_t) {
            double prod = 1.0;
            for (const auto& f : a) prod *= cube_average(f, q);
            return prod;
          });
        } else if constexpr (std::is_same_v<V, maximal::MultiMr>) {
          if (!(v.r > 1.0)) throw std::invalid_argument("multilinear_maximal: M_r needs r > 1");
          std::vector<GridFunction> a;
          for (const auto& f : fs) a.push_back(f.map([r = v.r](double x) { return std::pow(std::abs(x), r); }));
          return sup_over_cubes(g, cubes, [&](const Cube& q, std::size_t) {
            double prod = 1.0;
            for (const auto& f : a) prod *= std::pow(cube_average(f, q), 1.0 / v.r);
            return prod;
          });
        } else if constexpr (std::is_same_v<V, maximal::MultiLlogLi>) {
          if (v.i < 1 || v.i > static_cast<int>(fs.size()))
            throw std::invalid_argument("multilinear_maximal: slot index out of range");
          std::vector<GridFunction> a;
          for (const auto& f : fs) a.push_back(f.abs());
          return sup_over_cubes(g, cubes, [&](const Cube& q, std::size_t) {
            double prod = 1.0;
            for (std::size_t j = 0; j < a.size(); ++j)
              prod *= static_cast<int>(j) + 1 == v.i ? orlicz_cube_average(a[j], q, phi, tol)
                                                     : cube_average(a[j], q);
            return prod;
          });
        } else {
          return sup_over_cubes(g, cubes, [&](const Cube& q, std::size_t) {
            double prod = 1.0;
            for (const auto& f : fs) prod *= orlicz_cube_average(f, q, phi, tol);
            return prod;
          });
        }
      },
      variant);
}

inline GridFunction multilinear_maximal(std::initializer_list<GridFunction> fs,
                                        const MaximalVariant& variant, const CubeFamily& fam,
                                        double tol = kDefaultTol) {
  const std::vector<GridFunction> v(fs);
  return multilinear_maximal(std::span<const GridFunction>(v), variant, fam, tol);
}

}  // namespace vexan
