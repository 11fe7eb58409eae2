/**
 * @file commutators.hpp
 * @brief Commutators of multilinear operators with symbols b⃗, and the
 *        Lipschitz-type oscillation norms used to measure the symbols.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vexan/discretize.hpp"
#include "vexan/exponent.hpp"
#include "vexan/maximal.hpp"
#include "vexan/norms.hpp"
#include "vexan/operators.hpp"

namespace vexan {

namespace detail {
inline void check_slot(const KernelSpec& k, int j) {
  if (j < 1 || j > k.m) throw std::out_of_range("commutator: slot index out of range");
}

inline void check_inputs(const KernelSpec& k, std::span<const GridFunction> fs, std::size_t nb,
                         const char* who) {
  if (static_cast<int>(fs.size()) != k.m || static_cast<int>(nb) != k.m)
    throw std::invalid_argument(std::string(who) + ": need m functions and m symbols");
}
}  // namespace detail

/// T_{b_j}(f⃗) = b·T(f⃗) - T(f₁,…,b f_j,…,f_m), slot j is 1-based.
inline GridFunction commutator_j(const KernelSpec& k, const GridFunction& b, int j,
                                 std::span<const GridFunction> fs) {
  detail::check_slot(k, j);
  std::vector<GridFunction> shifted(fs.begin(), fs.end());
  if (!same_grid(fs) || !(b.grid() == fs.front().grid()))
    throw std::invalid_argument("commutator_j: mismatched grids");
  shifted[static_cast<std::size_t>(j - 1)] = b * shifted[static_cast<std::size_t>(j - 1)];
  return b * apply_multilinear(k, fs) - apply_multilinear(k, std::span<const GridFunction>(shifted));
}

/// Integrand form: ∫ K(x,y⃗) (b(x) - b(y_j)) ∏ f_i(y_i) dy⃗.
inline GridFunction commutator_j_integrand(const KernelSpec& k, const GridFunction& b, int j,
                                           std::span<const GridFunction> fs) {
  detail::check_slot(k, j);
  if (static_cast<int>(fs.size()) != k.m) throw std::invalid_argument("commutator_j: need m inputs");
  if (!same_grid(fs) || !(b.grid() == fs.front().grid()))
    throw std::invalid_argument("commutator_j: mismatched grids");
  const Quadrature q(k, b.grid());
  const std::size_t G = b.size();
  std::vector<std::vector<double>> plain;
  for (const auto& f : fs) plain.emplace_back(f.values().begin(), f.values().end());
  std::vector<double> weighted(G);
  const auto& fj = plain[static_cast<std::size_t>(j - 1)];
  return q.apply([&](std::size_t i, int slot) -> const std::vector<double>& {
    if (slot != j - 1) return plain[static_cast<std::size_t>(slot)];
    for (std::size_t c = 0; c < G; ++c) weighted[c] = (b[i] - b[c]) * fj[c];
    return weighted;
  });
}

/// T_{Σb}(f⃗) = Σ_j T_{b_j}(f⃗)
inline GridFunction sum_commutator(const KernelSpec& k, std::span<const GridFunction> bs,
                                   std::span<const GridFunction> fs) {
  detail::check_inputs(k, fs, bs.size(), "sum_commutator");
  GridFunction out = commutator_j(k, bs[0], 1, fs);
  for (int j = 2; j <= k.m; ++j) out = out + commutator_j(k, bs[static_cast<std::size_t>(j - 1)], j, fs);
  return out;
}

/// Integrand form of T_{Σb} with weight Σ_j (b_j(x) - b_j(y_j)).
inline GridFunction sum_commutator_integrand(const KernelSpec& k, std::span<const GridFunction> bs,
                                             std::span<const GridFunction> fs) {
  detail::check_inputs(k, fs, bs.size(), "sum_commutator");
  GridFunction out = commutator_j_integrand(k, bs[0], 1, fs);
  for (int j = 2; j <= k.m; ++j)
    out = out + commutator_j_integrand(k, bs[static_cast<std::size_t>(j - 1)], j, fs);
  return out;
}

/// T_{Πb}(f⃗)(x) = ∫ K(x,y⃗) ∏_j (b_j(x) - b_j(y_j)) f_j(y_j) dy⃗
inline GridFunction iterated_commutator(const KernelSpec& k, std::span<const GridFunction> bs,
                                        std::span<const GridFunction> fs) {
  detail::check_inputs(k, fs, bs.size(), "iterated_commutator");
  if (!same_grid(fs) || !same_grid(bs) || !(bs.front().grid() == fs.front().grid()))
    throw std::invalid_argument("iterated_commutator: mismatched grids");
  const Quadrature q(k, fs.front().grid());
  const std::size_t G = fs.front().size();
  std::vector<std::vector<double>> slots(fs.size(), std::vector<double>(G));
  return q.apply([&](std::size_t i, int slot) -> const std::vector<double>& {
    const auto s = static_cast<std::size_t>(slot);
    const auto& b = bs[s];
    const auto& f = fs[s];
    for (std::size_t c = 0; c < G; ++c) slots[s][c] = (b[i] - b[c]) * f[c];
    return slots[s];
  });
}

// ---------------------------------------------------------------------------
// Lipschitz-type norms

namespace lipschitz {
struct Lambda {
  double delta;
};
struct OscDelta {
  double delta;
};
struct OscAlphaP {
  double alpha;
  ExponentField p;
};
struct OscDeltaVar {
  double beta;
  ExponentField r;
};
struct OscWeighted {
  GridFunction w;
  double delta;
};
}  // namespace lipschitz

using LipschitzNormKind = std::variant<lipschitz::Lambda, lipschitz::OscDelta, lipschitz::OscAlphaP,
                                       lipschitz::OscDeltaVar, lipschitz::OscWeighted>;

inline constexpr std::size_t kExhaustivePairLimit = 4096;
inline constexpr std::size_t kRandomPairs = 1'000'000;
inline constexpr int kShortRangeCells = 8;
inline constexpr std::uint64_t kDefaultPairSeed = 7;

/// max over distinct node pairs of |b(x) - b(y)| / |x - y|^δ
inline double lambda_norm(const GridFunction& b, double delta, std::uint64_t seed = kDefaultPairSeed) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("lipschitz_norm: Λ_δ needs 0 < δ < 1");
  const auto& g = b.grid();
  const int n = g.dim();
  const std::size_t G = g.size();
  double best = 0.0;
  auto visit = [&](std::size_t a, std::size_t c) {
    const double d = distance(g.node(a), g.node(c), n);
    if (d > 0.0) best = std::max(best, std::abs(b[a] - b[c]) / std::pow(d, delta));
  };
  if (G <= kExhaustivePairLimit) {
    for (std::size_t a = 0; a < G; ++a)
      for (std::size_t c = a + 1; c < G; ++c) visit(a, c);
    return best;
  }
  const int N = g.points_per_axis();
  const int r = kShortRangeCells;
  for (std::size_t a = 0; a < G; ++a) {
    const Index ia = g.unflat(a);
    for (int d0 = -r; d0 <= r; ++d0)
      for (int d1 = (n > 1 ? -r : 0); d1 <= (n > 1 ? r : 0); ++d1) {
        if (d0 * d0 + d1 * d1 > r * r) continue;
        const Index ic{ia[0] + d0, ia[1] + d1};
        if (ic[0] < 0 || ic[0] >= N || (n > 1 && (ic[1] < 0 || ic[1] >= N))) continue;
        visit(a, g.flat(ic));
      }
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, G - 1);
  for (std::size_t t = 0; t < kRandomPairs; ++t) {
    const std::size_t a = pick(rng);
    visit(a, pick(rng));
  }
  return best;
}

namespace detail {
/// max over cubes of ∫_Q |b - b_Q| / denom(Q, cube index)
template <class Denominator>
double max_oscillation_ratio(const GridFunction& b, const std::vector<Cube>& cubes, Denominator&& denom) {
  const auto& g = b.grid();
  double best = 0.0;
  for (std::size_t c = 0; c < cubes.size(); ++c) {
    const double integral = mean_oscillation(cube_values(b, cubes[c])) * cubes[c].volume(g);
    best = std::max(best, integral / denom(cubes[c], c));
  }
  return best;
}
}  // namespace detail

inline double lipschitz_norm(const GridFunction& b, const LipschitzNormKind& kind, const CubeFamily& fam,
                             double tol = kDefaultTol) {
  const auto& g = b.grid();
  const int n = g.dim();
  return std::visit(
      [&](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, lipschitz::Lambda>) {
          return lambda_norm(b, v.delta);
        } else if constexpr (std::is_same_v<V, lipschitz::OscDelta>) {
          if (!(v.delta >= 0.0 && v.delta < 1.0)) throw std::invalid_argument("lipschitz_norm: need 0 ≤ δ < 1");
          return detail::max_oscillation_ratio(b, enumerate_cubes(g, fam), [&](const Cube& q, std::size_t) {
            return std::pow(q.volume(g), 1.0 + v.delta / n);
          });
        } else if constexpr (std::is_same_v<V, lipschitz::OscAlphaP>) {
          if (!(v.alpha > 0.0 && v.alpha < n)) throw std::invalid_argument("lipschitz_norm: need 0 < α < n");
          if (!(v.p.range().lo > 1.0)) throw std::invalid_argument("lipschitz_norm: need p_- > 1");
          const auto cubes = enumerate_cubes(g, fam);
          const auto cn = char_norms(sample_exponent(conjugate(v.p), g), cubes, tol);
          return detail::max_oscillation_ratio(b, cubes, [&](const Cube& q, std::size_t c) {
            return std::pow(q.volume(g), v.alpha / n) * cn[c];
          });
        } else if constexpr (std::is_same_v<V, lipschitz::OscDeltaVar>) {
          const auto bounds = exponent_bounds(v.r, g);
          if (!(v.beta > 1.0 && v.beta <= bounds.p_minus + 1e-12))
            throw std::invalid_argument("lipschitz_norm: need 1 < β ≤ r_-");
          const auto cubes = enumerate_cubes(g, fam);
          const auto cn = char_norms(sample_exponent(conjugate(v.r), g), cubes, tol);
          return detail::max_oscillation_ratio(b, cubes, [&](const Cube& q, std::size_t c) {
            return std::pow(q.volume(g), 1.0 / v.beta) * cn[c];
          });
        } else {
          if (!(v.delta >= 0.0 && v.delta < 1.0)) throw std::invalid_argument("lipschitz_norm: need 0 ≤ δ < 1");
          if (!(v.w.grid() == g)) throw std::invalid_argument("lipschitz_norm: weight on a different grid");
          // ‖wχ_Q‖_∞ multiplies the oscillation, so a zero weight contributes nothing.
          double best = 0.0;
          for (const auto& q : enumerate_cubes(g, fam)) {
            const auto wv = cube_values(v.w, q);
            double wmax = 0.0;
            for (double x : wv) wmax = std::max(wmax, std::abs(x));
            const double osc = mean_oscillation(cube_values(b, q));
            best = std::max(best, wmax * osc * std::pow(q.volume(g), -v.delta / n));
          }
          return best;
        }
      },
      kind);
}

}  // namespace vexan
