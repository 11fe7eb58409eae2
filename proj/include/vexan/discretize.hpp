/**
 * @file discretize.hpp
 * @brief Box domains, uniform cell-centred grids, sampled functions and cubes.
 *
 * Every operator in vexan works on a truncated box [-L, L]^n (n = 1 or 2)
 * covered by N^n congruent cells. A GridFunction stores one sample per cell
 * centre and is understood to vanish outside the box. Integrals use the
 * midpoint rule, so constants are integrated exactly.
 *
 * Cubes are grid-anchored: an integer anchor (lower-left cell) and a side
 * length in cells. Suprema "over all cubes containing x" are realised over a
 * finite CubeFamily. GeomCube covers the few places that need arbitrary
 * centred cubes (dilations), using exact cell-overlap volumes.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vexan {

using Point = std::array<double, 2>;
using Index = std::array<int, 2>;

/// Euclidean norm of the first `dim` coordinates.
inline double norm(const Point& x, int dim) {
  return dim == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
}

inline double distance(const Point& x, const Point& y, int dim) {
  return norm(Point{x[0] - y[0], x[1] - y[1]}, dim);
}

/// Sum with a fixed binary tree order; reproducible and more accurate than a
/// running sum for long vectors.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct BoxDomain {
  int dim = 1;
  double half_extent = 1.0;

  BoxDomain() = default;
  BoxDomain(int dim_, double half_extent_) : dim(dim_), half_extent(half_extent_) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("BoxDomain: dim must be 1 or 2");
    if (!(half_extent > 0.0) || !std::isfinite(half_extent))
      throw std::invalid_argument("BoxDomain: half_extent must be positive");
  }

  double volume() const { return std::pow(2.0 * half_extent, dim); }

  bool contains(const Point& x) const {
    for (int d = 0; d < dim; ++d)
      if (x[d] < -half_extent || x[d] > half_extent) return false;
    return true;
  }

  friend bool operator==(const BoxDomain&, const BoxDomain&) = default;
};

class UniformGrid {
 public:
  UniformGrid() = default;
  UniformGrid(BoxDomain domain, int points_per_axis) : domain_(domain), n_(points_per_axis) {
    if (n_ < 4) throw std::invalid_argument("UniformGrid: need at least 4 points per axis");
    h_ = 2.0 * domain_.half_extent / n_;
  }

  const BoxDomain& domain() const { return domain_; }
  int dim() const { return domain_.dim; }
  int points_per_axis() const { return n_; }
  double spacing() const { return h_; }
  double cell_volume() const { return std::pow(h_, dim()); }
  double half_extent() const { return domain_.half_extent; }

  std::size_t size() const {
    return dim() == 1 ? static_cast<std::size_t>(n_) : static_cast<std::size_t>(n_) * n_;
  }

  /// Row-major: the last axis varies fastest.
  std::size_t flat(const Index& i) const {
    return dim() == 1 ? static_cast<std::size_t>(i[0])
                      : static_cast<std::size_t>(i[0]) * n_ + static_cast<std::size_t>(i[1]);
  }

  Index unflat(std::size_t k) const {
    if (dim() == 1) return {static_cast<int>(k), 0};
    return {static_cast<int>(k / n_), static_cast<int>(k % n_)};
  }

  double coordinate(int i) const { return -domain_.half_extent + (i + 0.5) * h_; }

  Point node(const Index& i) const {
    return dim() == 1 ? Point{coordinate(i[0]), 0.0} : Point{coordinate(i[0]), coordinate(i[1])};
  }
  Point node(std::size_t k) const { return node(unflat(k)); }

  /// Cell index along one axis for a coordinate inside the domain; points on
  /// an interior cell face go to the upper cell.
  int cell_of(double c) const {
    const int i = static_cast<int>(std::floor((c + domain_.half_extent) / h_));
    return std::clamp(i, 0, n_ - 1);
  }

  friend bool operator==(const UniformGrid& a, const UniformGrid& b) {
    return a.domain_ == b.domain_ && a.n_ == b.n_;
  }

 private:
  BoxDomain domain_{};
  int n_ = 4;
  double h_ = 0.5;
};

/// Real samples at cell centres; zero outside the domain.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(const UniformGrid& grid) : grid_(grid), values_(grid.size(), 0.0) {}
  GridFunction(const UniformGrid& grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw std::invalid_argument("GridFunction: value count does not match grid");
    for (double v : values_)
      if (!std::isfinite(v)) throw std::domain_error("GridFunction: non-finite sample");
  }

  template <class F>
  static GridFunction sample(const UniformGrid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(grid.node(k));
    return GridFunction(grid, std::move(v));
  }

  const UniformGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }

  template <class Op>
  GridFunction map(Op&& op) const {
    std::vector<double> v(values_.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = op(values_[k]);
    return GridFunction(grid_, std::move(v));
  }

  template <class Op>
  GridFunction zip(const GridFunction& other, Op&& op) const {
    if (!(other.grid_ == grid_)) throw std::invalid_argument("GridFunction: grid mismatch");
    std::vector<double> v(values_.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = op(values_[k], other.values_[k]);
    return GridFunction(grid_, std::move(v));
  }

  GridFunction abs() const { return map([](double x) { return std::abs(x); }); }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
  }

  friend GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    return a.zip(b, [](double x, double y) { return x + y; });
  }
  friend GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    return a.zip(b, [](double x, double y) { return x - y; });
  }
  friend GridFunction operator*(const GridFunction& a, const GridFunction& b) {
    return a.zip(b, [](double x, double y) { return x * y; });
  }
  friend GridFunction operator*(double c, const GridFunction& a) {
    return a.map([c](double x) { return c * x; });
  }

 private:
  UniformGrid grid_{};
  std::vector<double> values_{};
};

inline bool same_grid(std::span<const GridFunction> fs) {
  for (const auto& f : fs)
    if (!(f.grid() == fs.front().grid())) return false;
  return true;
}

/// Midpoint rule: sum of samples times the cell volume.
inline double integrate(const GridFunction& f) {
  return pairwise_sum(f.values()) * f.grid().cell_volume();
}

// ---------------------------------------------------------------------------
// Cubes

struct Cube {
  Index anchor{0, 0};
  int side = 1;  // in cells

  double side_length(const UniformGrid& g) const { return side * g.spacing(); }
  double volume(const UniformGrid& g) const { return std::pow(side_length(g), g.dim()); }
  std::size_t cell_count(int dim) const {
    return dim == 1 ? static_cast<std::size_t>(side) : static_cast<std::size_t>(side) * side;
  }

  bool contains_cell(const Index& i, int dim) const {
    for (int d = 0; d < dim; ++d)
      if (i[d] < anchor[d] || i[d] >= anchor[d] + side) return false;
    return true;
  }

  bool inside(const UniformGrid& g) const {
    for (int d = 0; d < g.dim(); ++d)
      if (anchor[d] < 0 || anchor[d] + side > g.points_per_axis()) return false;
    return side >= 1;
  }

  Point center(const UniformGrid& g) const {
    Point c{0.0, 0.0};
    for (int d = 0; d < g.dim(); ++d)
      c[d] = -g.half_extent() + (anchor[d] + 0.5 * side) * g.spacing();
    return c;
  }

  /// Closed geometric region contains x (with a relative slack of 1e-12·h).
  bool contains_point(const UniformGrid& g, const Point& x) const {
    const double eps = 1e-12 * g.spacing();
    for (int d = 0; d < g.dim(); ++d) {
      const double lo = -g.half_extent() + anchor[d] * g.spacing();
      const double hi = lo + side * g.spacing();
      if (x[d] < lo - eps || x[d] > hi + eps) return false;
    }
    return true;
  }

  friend bool operator==(const Cube&, const Cube&) = default;
};

/// Calls fn(flat_index) for every cell covered by Q, in row-major order.
template <class Fn>
void for_each_cell(const UniformGrid& g, const Cube& q, Fn&& fn) {
  if (g.dim() == 1) {
    for (int i = q.anchor[0]; i < q.anchor[0] + q.side; ++i) fn(static_cast<std::size_t>(i));
    return;
  }
  const std::size_t n = static_cast<std::size_t>(g.points_per_axis());
  for (int i = q.anchor[0]; i < q.anchor[0] + q.side; ++i)
    for (int j = q.anchor[1]; j < q.anchor[1] + q.side; ++j)
      fn(static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j));
}

enum class CubePolicy { all_grid_cubes, dyadic };

struct CubeFamily {
  CubePolicy policy = CubePolicy::all_grid_cubes;
  int max_side_cells = 0;  // 0: no limit

  static CubeFamily all(int max_side = 0) { return {CubePolicy::all_grid_cubes, max_side}; }
  static CubeFamily dyadic(int max_side = 0) { return {CubePolicy::dyadic, max_side}; }
};

/// Ordered by side length, then anchor in row-major order. Dyadic cubes have
/// power-of-two sides anchored at multiples of the side.
inline std::vector<Cube> enumerate_cubes(const UniformGrid& g, const CubeFamily& fam) {
  const int n = g.points_per_axis();
  const int smax = fam.max_side_cells > 0 ? std::min(fam.max_side_cells, n) : n;
  std::vector<Cube> out;
  auto emit_side = [&](int s, int stride) {
    for (int i = 0; i + s <= n; i += stride) {
      if (g.dim() == 1) {
        out.push_back(Cube{{i, 0}, s});
      } else {
        for (int j = 0; j + s <= n; j += stride) out.push_back(Cube{{i, j}, s});
      }
    }
  };
  if (fam.policy == CubePolicy::all_grid_cubes) {
    for (int s = 1; s <= smax; ++s) emit_side(s, 1);
  } else {
    for (int s = 1; s <= smax; s *= 2) emit_side(s, s);
  }
  return out;
}

inline std::vector<Cube> cubes_containing(const UniformGrid& g, const Point& x,
                                          const CubeFamily& fam) {
  if (!g.domain().contains(x)) throw std::out_of_range("cubes_containing: point outside domain");
  std::vector<Cube> out;
  for (const Cube& q : enumerate_cubes(g, fam))
    if (q.contains_point(g, x)) out.push_back(q);
  return out;
}

inline double cube_sum(const GridFunction& f, const Cube& q) {
  double s = 0.0;
  for_each_cell(f.grid(), q, [&](std::size_t k) { s += f[k]; });
  return s;
}

inline double cube_average(const GridFunction& f, const Cube& q) {
  return cube_sum(f, q) / static_cast<double>(q.cell_count(f.grid().dim()));
}

/// Values of f on the cells of Q, row-major.
inline std::vector<double> cube_values(const GridFunction& f, const Cube& q) {
  std::vector<double> v;
  v.reserve(q.cell_count(f.grid().dim()));
  for_each_cell(f.grid(), q, [&](std::size_t k) { v.push_back(f[k]); });
  return v;
}

inline GridFunction restrict_to(const GridFunction& f, const Cube& q) {
  std::vector<double> v(f.size(), 0.0);
  for_each_cell(f.grid(), q, [&](std::size_t k) { v[k] = f[k]; });
  return GridFunction(f.grid(), std::move(v));
}

inline GridFunction indicator(const UniformGrid& g, const Cube& q) {
  std::vector<double> v(g.size(), 0.0);
  for_each_cell(g, q, [&](std::size_t k) { v[k] = 1.0; });
  return GridFunction(g, std::move(v));
}

// ---------------------------------------------------------------------------
// Arbitrary centred cubes (used for dilations tQ)

struct GeomCube {
  Point center{0.0, 0.0};
  double side = 1.0;

  GeomCube dilate(double t) const { return {center, t * side}; }
  double volume(int dim) const { return std::pow(side, dim); }

  bool inside(const BoxDomain& d) const {
    for (int k = 0; k < d.dim; ++k)
      if (center[k] - side / 2 < -d.half_extent - 1e-12 || center[k] + side / 2 > d.half_extent + 1e-12)
        return false;
    return true;
  }

  static GeomCube of(const UniformGrid& g, const Cube& q) { return {q.center(g), q.side_length(g)}; }
};

struct CellWeight {
  std::size_t cell;
  double volume;  // |cell ∩ Q|
};

/// Exact overlap volumes between Q ∩ domain and the grid cells.
inline std::vector<CellWeight> overlap_weights(const UniformGrid& g, const GeomCube& q) {
  const double h = g.spacing();
  const double L = g.half_extent();
  const int n = g.points_per_axis();
  std::array<std::vector<std::pair<int, double>>, 2> axis;
  for (int d = 0; d < g.dim(); ++d) {
    const double lo = std::max(q.center[d] - q.side / 2, -L);
    const double hi = std::min(q.center[d] + q.side / 2, L);
    if (hi <= lo) return {};
    const int i0 = std::clamp(static_cast<int>(std::floor((lo + L) / h)), 0, n - 1);
    const int i1 = std::clamp(static_cast<int>(std::ceil((hi + L) / h)) - 1, 0, n - 1);
    for (int i = i0; i <= i1; ++i) {
      const double c_lo = -L + i * h;
      const double w = std::min(hi, c_lo + h) - std::max(lo, c_lo);
      if (w > 0.0) axis[d].emplace_back(i, w);
    }
  }
  std::vector<CellWeight> out;
  if (g.dim() == 1) {
    for (auto [i, w] : axis[0]) out.push_back({static_cast<std::size_t>(i), w});
  } else {
    for (auto [i, wi] : axis[0])
      for (auto [j, wj] : axis[1]) out.push_back({g.flat({i, j}), wi * wj});
  }
  return out;
}

/// |Q|^{-1} ∫_Q f for an arbitrary cube inside the domain.
inline double geom_average(const GridFunction& f, const GeomCube& q) {
  double s = 0.0, vol = 0.0;
  for (const auto& cw : overlap_weights(f.grid(), q)) {
    s += cw.volume * f[cw.cell];
    vol += cw.volume;
  }
  return vol > 0.0 ? s / vol : 0.0;
}

// ---------------------------------------------------------------------------
// CSV exchange: three header lines (dim, N, L), then one value per line in
// row-major order.

inline void write_csv(const GridFunction& f, std::ostream& os) {
  const auto& g = f.grid();
  os << g.dim() << '\n' << g.points_per_axis() << '\n'
     << std::setprecision(17) << g.half_extent() << '\n';
  for (double v : f.values()) os << std::setprecision(17) << v << '\n';
}

inline GridFunction read_csv(std::istream& is) {
  auto next_line = [&](const char* what) {
    std::string line;
    while (std::getline(is, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return line;
    }
    throw std::runtime_error(std::string("grid csv: missing ") + what);
  };
  auto parse = [](const std::string& s, const char* what) {
    std::istringstream ss(s);
    double v;
    if (!(ss >> v)) throw std::runtime_error(std::string("grid csv: bad ") + what + ": " + s);
    return v;
  };
  const int dim = static_cast<int>(parse(next_line("dim"), "dim"));
  const int n = static_cast<int>(parse(next_line("N"), "N"));
  const double L = parse(next_line("L"), "L");
  UniformGrid g(BoxDomain(dim, L), n);
  std::vector<double> v;
  v.reserve(g.size());
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    v.push_back(parse(line, "value"));
  }
  if (v.size() != g.size())
    throw std::runtime_error("grid csv: expected " + std::to_string(g.size()) + " values, got " +
                             std::to_string(v.size()));
  return GridFunction(g, std::move(v));
}

}  // namespace vexan
