/**
 * @file operators.hpp
 * @brief m-linear convolution kernels, their numerical certification and
 *        operator application by cell-centred quadrature.
 *
 * Both kernel kinds depend on (x, y⃗) only through S = Σ_j |x - y_j|, so the
 * quadrature works from a per-node distance table.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vexan/discretize.hpp"

namespace vexan {

inline constexpr std::uint64_t kDefaultKernelSeed = 20240611;

struct MollifiedCZ {
  double rho;
};
struct Fractional {
  double alpha;
};

struct KernelSpec {
  int m = 1;
  int n = 1;
  std::variant<MollifiedCZ, Fractional> kind = MollifiedCZ{1.0};
  double A = 1.0;           // size constant
  double eps = 1.0;         // smoothness order
  double A_smooth_x = 0.0;  // x-perturbation constant
  double A_smooth_y = 0.0;  // y_j-perturbation constant
  double scale = 1.0;       // overall multiplier

  bool is_fractional() const { return std::holds_alternative<Fractional>(kind); }
  double alpha() const { return is_fractional() ? std::get<Fractional>(kind).alpha : 0.0; }
  double rho() const { return is_fractional() ? 0.0 : std::get<MollifiedCZ>(kind).rho; }

  /// Decay exponent of the size estimate: mn, or mn - α for fractional kernels.
  double size_exponent() const { return m * n - alpha(); }

  double of_sum(double s) const {
    if (is_fractional()) return scale * std::pow(s, alpha() - m * n);
    return scale * std::pow(rho() + s, -static_cast<double>(m * n));
  }

  double distance_sum(const Point& x, std::span<const Point> ys) const {
    double s = 0.0;
    for (const auto& y : ys) s += distance(x, y, n);
    return s;
  }

  double operator()(const Point& x, std::span<const Point> ys) const {
    if (static_cast<int>(ys.size()) != m) throw std::invalid_argument("KernelSpec: expected m points");
    return of_sum(distance_sum(x, ys));
  }

  std::string describe() const {
    std::ostringstream os;
    if (is_fractional())
      os << "fractional(alpha=" << alpha() << ")";
    else
      os << "mollified_cz(rho=" << rho() << ")";
    os << " m=" << m << " n=" << n;
    if (scale != 1.0) os << " scale=" << scale;
    return os.str();
  }
};

struct SmoothnessMeasure {
  double A_x = 0.0;
  double A_y = 0.0;
};

namespace detail {

struct KernelSampler {
  std::mt19937_64 rng;
  int n;

  Point direction() {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Point d{0.0, 0.0};
    double r = 0.0;
    do {
      for (int k = 0; k < n; ++k) d[k] = gauss(rng);
      r = norm(d, n);
    } while (r == 0.0);
    for (int k = 0; k < n; ++k) d[k] /= r;
    return d;
  }

  double log_uniform(double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
  }

  Point offset(const Point& base, double lo, double hi) {
    const auto d = direction();
    const double r = log_uniform(lo, hi);
    return {base[0] + r * d[0], n > 1 ? base[1] + r * d[1] : 0.0};
  }

  Point origin() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return {u(rng), n > 1 ? u(rng) : 0.0};
  }
};

inline constexpr double kScaleLo = 1e-3;
inline constexpr double kScaleHi = 1e3;

}  // namespace detail

/// max over sampled configurations of |K|·S^{mn} (S^{mn-α} for fractional kernels).
inline double kernel_size_check(const KernelSpec& k, int samples, std::uint64_t seed = kDefaultKernelSeed) {
  if (samples < 1) throw std::invalid_argument("kernel_size_check: samples must be ≥ 1");
  detail::KernelSampler s{std::mt19937_64(seed), k.n};
  double worst = 0.0;
  std::vector<Point> ys(k.m);
  for (int it = 0; it < samples; ++it) {
    const Point x = s.origin();
    for (auto& y : ys) y = s.offset(x, detail::kScaleLo, detail::kScaleHi);
    const double sum = k.distance_sum(x, ys);
    if (sum <= 0.0) continue;
    worst = std::max(worst, std::abs(k(x, ys)) * std::pow(sum, k.size_exponent()));
  }
  return worst;
}

namespace detail {

// One perturbation sample: moved = -1 perturbs x, otherwise y_moved.
struct SmoothnessSample {
  Point x;
  std::vector<Point> ys;
  int moved = -1;
  Point to;
};

// LHS/RHS of (1.2) or (1.3) at a sample; 0 when the pair is not admissible.
inline double smoothness_ratio(const KernelSpec& k, const SmoothnessSample& c) {
  double far = 0.0;
  for (const auto& y : c.ys) far = std::max(far, distance(c.x, y, k.n));
  const Point& from = c.moved < 0 ? c.x : c.ys[static_cast<std::size_t>(c.moved)];
  const double d = distance(from, c.to, k.n);
  if (!(d > 0.0) || d > 0.5 * far) return 0.0;
  const double sum = k.distance_sum(c.x, c.ys);
  if (!(sum > 0.0)) return 0.0;
  double moved_value;
  if (c.moved < 0) {
    moved_value = k(c.to, c.ys);
  } else {
    auto ys2 = c.ys;
    ys2[static_cast<std::size_t>(c.moved)] = c.to;
    moved_value = k(c.x, ys2);
  }
  return std::abs(k(c.x, c.ys) - moved_value) * std::pow(sum, k.size_exponent() + k.eps) / std::pow(d, k.eps);
}

inline constexpr int kRefineStarts = 8;
inline constexpr int kRefineSteps = 400;

// Random-walk ascent from a sample with a shrinking step relative to the
// configuration scale. Only admissible improvements are kept.
inline double refine_smoothness(const KernelSpec& k, SmoothnessSample c, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  double best = smoothness_ratio(k, c);
  double far = 0.0;
  for (const auto& y : c.ys) far = std::max(far, distance(c.x, y, k.n));
  double step = 0.1 * far;
  auto jiggle = [&](Point p) {
    for (int d = 0; d < k.n; ++d) p[d] += step * gauss(rng);
    return p;
  };
  for (int it = 0; it < kRefineSteps; ++it) {
    SmoothnessSample t = c;
    t.x = jiggle(t.x);
    for (auto& y : t.ys) y = jiggle(y);
    t.to = jiggle(t.to);
    const double v = smoothness_ratio(k, t);
    if (v > best) {
      best = v;
      c = std::move(t);
    } else {
      step *= 0.985;
    }
  }
  return best;
}

}  // namespace detail

/// Ratios LHS/RHS of the two smoothness estimates over admissible sampled pairs.
/// The x-perturbation and each y_j-perturbation are bounded by ½ max_j |x - y_j|.
/// The best few random samples of each kind are then pushed uphill by a local walk.
inline SmoothnessMeasure kernel_smoothness_check(const KernelSpec& k, int samples,
                                                 std::uint64_t seed = kDefaultKernelSeed) {
  if (samples < 1) throw std::invalid_argument("kernel_smoothness_check: samples must be ≥ 1");
  detail::KernelSampler s{std::mt19937_64(seed), k.n};
  using Ranked = std::pair<double, detail::SmoothnessSample>;
  std::vector<Ranked> top_x, top_y;
  auto keep = [](std::vector<Ranked>& top, double v, const detail::SmoothnessSample& c) {
    if (!(v > 0.0)) return;
    if (static_cast<int>(top.size()) < detail::kRefineStarts) {
      top.emplace_back(v, c);
    } else {
      auto low = std::min_element(top.begin(), top.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      if (v <= low->first) return;
      *low = {v, c};
    }
  };
  std::uniform_int_distribution<int> slot(0, k.m - 1);
  for (int it = 0; it < samples; ++it) {
    detail::SmoothnessSample c{s.origin(), std::vector<Point>(static_cast<std::size_t>(k.m)), -1, {}};
    double far = 0.0;
    for (auto& y : c.ys) {
      y = s.offset(c.x, detail::kScaleLo, detail::kScaleHi);
      far = std::max(far, distance(c.x, y, k.n));
    }
    c.to = s.offset(c.x, 1e-6 * far, 0.5 * far);
    keep(top_x, detail::smoothness_ratio(k, c), c);

    c.moved = slot(s.rng);
    c.to = s.offset(c.ys[static_cast<std::size_t>(c.moved)], 1e-6 * far, 0.5 * far);
    keep(top_y, detail::smoothness_ratio(k, c), c);
  }
  SmoothnessMeasure out;
  std::mt19937_64 walk(seed ^ 0x9e3779b97f4a7c15ULL);
  for (const auto& [v, c] : top_x) out.A_x = std::max({out.A_x, v, detail::refine_smoothness(k, c, walk)});
  for (const auto& [v, c] : top_y) out.A_y = std::max({out.A_y, v, detail::refine_smoothness(k, c, walk)});
  return out;
}

namespace detail {
inline constexpr int kCertifySamples = 4000;

inline void certify(const KernelSpec& k) {
  const double a = kernel_size_check(k, kCertifySamples);
  const auto sm = kernel_smoothness_check(k, kCertifySamples);
  if (a > k.A * (1.0 + 1e-12) || sm.A_x > k.A_smooth_x * (1.0 + 1e-12) ||
      sm.A_y > k.A_smooth_y * (1.0 + 1e-12))
    throw std::logic_error("kernel certification failed for " + k.describe());
}

// Gradient bound along the perturbation segment. Moving x changes every
// |x - y_j| but the largest one stays ≥ S/(2m); moving one y_j keeps S ≥ S/2.
inline void set_smoothness(KernelSpec& k) {
  const double d = k.size_exponent();
  k.A_smooth_x = k.scale * d * k.m * std::pow(2.0 * k.m, d + 1.0);
  k.A_smooth_y = k.scale * d * std::pow(2.0, d + 1.0);
}
}  // namespace detail

inline KernelSpec make_mollified_cz_kernel(int m, int n, double rho, double scale = 1.0) {
  if (m < 1 || m > 2) throw std::invalid_argument("kernel: m must be 1 or 2");
  if (n < 1 || n > 2) throw std::invalid_argument("kernel: n must be 1 or 2");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("kernel: ρ must be positive");
  if (!(scale > 0.0)) throw std::invalid_argument("kernel: scale must be positive");
  KernelSpec k{m, n, MollifiedCZ{rho}, scale, 1.0, 0.0, 0.0, scale};
  detail::set_smoothness(k);
  detail::certify(k);
  return k;
}

inline KernelSpec make_fractional_kernel(int m, int n, double alpha, double scale = 1.0) {
  if (m < 1 || m > 2) throw std::invalid_argument("kernel: m must be 1 or 2");
  if (n < 1 || n > 2) throw std::invalid_argument("kernel: n must be 1 or 2");
  if (!(alpha > 0.0 && alpha < m * n)) throw std::invalid_argument("kernel: need 0 < α < mn");
  KernelSpec k{m, n, Fractional{alpha}, scale, 1.0, 0.0, 0.0, scale};
  detail::set_smoothness(k);
  return k;
}

// ---------------------------------------------------------------------------
// Quadrature

namespace detail {

inline constexpr int kNearRadiusCells = 2;
inline constexpr int kSubdivision = 4;

struct Offset {
  int d0, d1;
};

inline std::vector<Offset> near_offsets(int n) {
  std::vector<Offset> out;
  const int r = kNearRadiusCells;
  for (int a = -r; a <= r; ++a)
    for (int b = (n > 1 ? -r : 0); b <= (n > 1 ? r : 0); ++b)
      if (a * a + b * b <= r * r) out.push_back({a, b});
  return out;
}

/// Sub-cell centres of the reference cell, in units of h.
inline std::vector<Point> sub_points(int n) {
  std::vector<double> c;
  for (int i = 0; i < kSubdivision; ++i) c.push_back((i + 0.5) / kSubdivision - 0.5);
  std::vector<Point> out;
  if (n == 1) {
    for (double a : c) out.push_back({a, 0.0});
  } else {
    for (double a : c)
      for (double b : c) out.push_back({a, b});
  }
  return out;
}

/// Mean of K over sub-point tuples for each tuple of near offsets (row-major in slots).
inline std::vector<double> near_table(const KernelSpec& k, double h, const std::vector<Offset>& offs) {
  const auto sub = sub_points(k.n);
  const std::size_t no = offs.size();
  auto cell_point = [&](const Offset& o, const Point& s) { return Point{(o.d0 + s[0]) * h, (o.d1 + s[1]) * h}; };
  const Point x{0.0, 0.0};
  std::vector<double> out;
  if (k.m == 1) {
    out.resize(no);
    for (std::size_t a = 0; a < no; ++a) {
      double acc = 0.0;
      for (const auto& s : sub) acc += k.of_sum(distance(x, cell_point(offs[a], s), k.n));
      out[a] = acc / static_cast<double>(sub.size());
    }
  } else {
    out.resize(no * no);
    for (std::size_t a = 0; a < no; ++a)
      for (std::size_t b = 0; b < no; ++b) {
        double acc = 0.0;
        for (const auto& s1 : sub) {
          const double r1 = distance(x, cell_point(offs[a], s1), k.n);
          for (const auto& s2 : sub) acc += k.of_sum(r1 + distance(x, cell_point(offs[b], s2), k.n));
        }
        out[a * no + b] = acc / static_cast<double>(sub.size() * sub.size());
      }
  }
  return out;
}

}  // namespace detail

/// Integral operator engine: out(x_i) = Σ_{cell tuples} W(i, k⃗) ∏_j v_j(i)[k_j] · h^{mn},
/// where W is K at cell centres, replaced by a sub-cell mean near the singular
/// configuration of fractional kernels. `slot_values(i, j)` returns the slot-j
/// integrand samples for output node i.
class Quadrature {
 public:
  Quadrature(const KernelSpec& k, const UniformGrid& g) : k_(k), g_(g) {
    if (k.n != g.dim()) throw std::invalid_argument("Quadrature: kernel and grid dimension differ");
    if (k_.is_fractional()) {
      offs_ = detail::near_offsets(g.dim());
      table_ = detail::near_table(k_, g.spacing(), offs_);
    }
  }

  const KernelSpec& kernel() const { return k_; }
  const UniformGrid& grid() const { return g_; }

  template <class SlotValues>
  GridFunction apply(SlotValues&& slot_values) const {
    const std::size_t G = g_.size();
    const double w = std::pow(g_.cell_volume(), k_.m);
    std::vector<double> out(G, 0.0);
    std::vector<double> dist(G);
    std::vector<int> near(G, -1);
    for (std::size_t i = 0; i < G; ++i) {
      const Point x = g_.node(i);
      const Index xi = g_.unflat(i);
      for (std::size_t c = 0; c < G; ++c) dist[c] = distance(x, g_.node(c), g_.dim());
      std::vector<std::size_t> near_cells;
      if (!offs_.empty()) {
        for (std::size_t o = 0; o < offs_.size(); ++o) {
          const Index yi{xi[0] + offs_[o].d0, xi[1] + offs_[o].d1};
          if (!in_grid(yi)) continue;
          const std::size_t c = g_.flat(yi);
          near[c] = static_cast<int>(o);
          near_cells.push_back(c);
        }
      }
      if (k_.m == 1) {
        const auto& v = slot_values(i, 0);
        double acc = 0.0;
        for (std::size_t c = 0; c < G; ++c) {
          if (v[c] == 0.0) continue;
          acc += weight1(dist[c], near[c]) * v[c];
        }
        out[i] = acc * w;
      } else {
        const auto& v1 = slot_values(i, 0);
        const auto& v2 = slot_values(i, 1);
        double acc = 0.0;
        for (std::size_t a = 0; a < G; ++a) {
          if (v1[a] == 0.0) continue;
          double inner = 0.0;
          for (std::size_t b = 0; b < G; ++b) {
            if (v2[b] == 0.0) continue;
            inner += weight2(dist[a], dist[b], near[a], near[b]) * v2[b];
          }
          acc += inner * v1[a];
        }
        out[i] = acc * w;
      }
      for (std::size_t c : near_cells) near[c] = -1;
    }
    return GridFunction(g_, std::move(out));
  }

 private:
  bool in_grid(const Index& i) const {
    const int N = g_.points_per_axis();
    for (int d = 0; d < g_.dim(); ++d)
      if (i[d] < 0 || i[d] >= N) return false;
    return true;
  }

  double weight1(double r, int near) const {
    if (near >= 0) return table_[static_cast<std::size_t>(near)];
    return k_.of_sum(r);
  }

  double weight2(double r1, double r2, int n1, int n2) const {
    if (n1 >= 0 && n2 >= 0) return table_[static_cast<std::size_t>(n1) * offs_.size() + static_cast<std::size_t>(n2)];
    return k_.of_sum(r1 + r2);
  }

  KernelSpec k_;
  UniformGrid g_;
  std::vector<detail::Offset> offs_;
  std::vector<double> table_;
};

/// T(f₁,…,f_m)(x) = ∫ K(x,y⃗) ∏ f_j(y_j) dy⃗ by cell-centred quadrature.
inline GridFunction apply_multilinear(const KernelSpec& k, std::span<const GridFunction> fs) {
  if (static_cast<int>(fs.size()) != k.m) throw std::invalid_argument("apply_multilinear: need m inputs");
  if (!same_grid(fs)) throw std::invalid_argument("apply_multilinear: mismatched grids");
  if (k.is_fractional() && !(k.alpha() > 0.0)) throw std::invalid_argument("apply_multilinear: α must be positive");
  const Quadrature q(k, fs.front().grid());
  std::vector<std::vector<double>> vals;
  for (const auto& f : fs) vals.emplace_back(f.values().begin(), f.values().end());
  return q.apply([&](std::size_t, int j) -> const std::vector<double>& { return vals[static_cast<std::size_t>(j)]; });
}

inline GridFunction apply_multilinear(const KernelSpec& k, std::initializer_list<GridFunction> fs) {
  const std::vector<GridFunction> v(fs);
  return apply_multilinear(k, std::span<const GridFunction>(v));
}

/// I_α(f⃗)(x) = ∫ (Σ|x - y_j|)^{α-mn} ∏ f_j(y_j) dy⃗
inline GridFunction fractional_integral(double alpha, std::span<const GridFunction> fs) {
  if (fs.empty()) throw std::invalid_argument("fractional_integral: no inputs");
  const int m = static_cast<int>(fs.size());
  const int n = fs.front().grid().dim();
  if (!(alpha > 0.0 && alpha < m * n)) throw std::invalid_argument("fractional_integral: need 0 < α < mn");
  return apply_multilinear(make_fractional_kernel(m, n, alpha), fs);
}

inline GridFunction fractional_integral(double alpha, std::initializer_list<GridFunction> fs) {
  const std::vector<GridFunction> v(fs);
  return fractional_integral(alpha, std::span<const GridFunction>(v));
}

}  // namespace vexan
