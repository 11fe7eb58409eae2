/**
 * @file families.hpp
 * @brief Seeded closed-form test functions and symbols. Each one is kept as a
 *        descriptor so it can be resampled on any grid.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vexan/discretize.hpp"
#include "vexan/exponent.hpp"

namespace vexan {

enum class FunctionKind { bump, cube_indicator, power, piecewise, holder_power, sine };

inline const char* to_string(FunctionKind k) {
  switch (k) {
    case FunctionKind::bump: return "bump";
    case FunctionKind::cube_indicator: return "cube_indicator";
    case FunctionKind::power: return "power";
    case FunctionKind::piecewise: return "piecewise";
    case FunctionKind::holder_power: return "holder_power";
    case FunctionKind::sine: return "sine";
  }
  return "?";
}

/// "mixed" → nullopt; otherwise one of the four input families.
inline std::optional<FunctionKind> parse_input_family(const std::string& name) {
  if (name == "mixed") return std::nullopt;
  for (auto k : {FunctionKind::bump, FunctionKind::cube_indicator, FunctionKind::power, FunctionKind::piecewise})
    if (name == to_string(k)) return k;
  throw std::invalid_argument("unknown input family '" + name + "'");
}

inline constexpr double kPowerFloor = 1e-3;

/// Parameter layouts:
///   bump          [amp, cx, cy, r]            amp·∏_d ψ(|x_d-c_d|/r)
///   cube_indicator[amp, cx, cy, s]            amp·χ{max_d |x_d-c_d| < s}
///   power         [amp, cx, cy, s, r]         amp·max(|x-c|, 1e-3)^s on |x-c| < r
///   piecewise     [amp, L, v_0, …]            amp·v_k on the k-th of 4^n blocks of [-L, L]^n
///   holder_power  [amp, cx, cy, δ]            amp·|x-c|^δ
///   sine          [amp, ω, φ]                 amp·sin(ω·Σ_d x_d + φ)
struct TestFunction {
  FunctionKind kind = FunctionKind::bump;
  std::vector<double> params;
  int dim = 1;

  double operator()(const Point& x) const {
    const auto& p = params;
    switch (kind) {
      case FunctionKind::bump: {
        double v = p[0];
        for (int d = 0; d < dim; ++d) v *= bump_profile(std::abs(x[d] - p[1 + d]) / p[3]);
        return v;
      }
      case FunctionKind::cube_indicator: {
        for (int d = 0; d < dim; ++d)
          if (!(std::abs(x[d] - p[1 + d]) < p[3])) return 0.0;
        return p[0];
      }
      case FunctionKind::power: {
        const double r = distance(x, Point{p[1], p[2]}, dim);
        if (!(r < p[4])) return 0.0;
        return p[0] * std::pow(std::max(r, kPowerFloor), p[3]);
      }
      case FunctionKind::piecewise: {
        const double L = p[1];
        std::size_t k = 0;
        for (int d = 0; d < dim; ++d) {
          const int cell = std::clamp(static_cast<int>(std::floor((x[d] + L) / (2.0 * L) * 4.0)), 0, 3);
          k = k * 4 + static_cast<std::size_t>(cell);
        }
        return p[0] * p[2 + k];
      }
      case FunctionKind::holder_power:
        return p[0] * std::pow(distance(x, Point{p[1], p[2]}, dim), p[3]);
      case FunctionKind::sine: {
        double s = 0.0;
        for (int d = 0; d < dim; ++d) s += x[d];
        return p[0] * std::sin(p[1] * s + p[2]);
      }
    }
    return 0.0;
  }

  GridFunction on(const UniformGrid& g) const {
    if (g.dim() != dim) throw std::invalid_argument("TestFunction: grid dimension differs");
    return GridFunction::sample(g, *this);
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(6);
    os << to_string(kind) << "(";
    for (std::size_t i = 0; i < params.size(); ++i) os << (i ? "," : "") << params[i];
    os << ")";
    return os.str();
  }

  static TestFunction bump(double amp, Point c, double r, int dim) { return {FunctionKind::bump, {amp, c[0], c[1], r}, dim}; }
  static TestFunction cube_indicator(double amp, Point c, double s, int dim) {
    return {FunctionKind::cube_indicator, {amp, c[0], c[1], s}, dim};
  }
  static TestFunction power(double amp, Point c, double s, double r, int dim) {
    return {FunctionKind::power, {amp, c[0], c[1], s, r}, dim};
  }
  static TestFunction holder_power(double amp, Point c, double delta, int dim) {
    return {FunctionKind::holder_power, {amp, c[0], c[1], delta}, dim};
  }
  static TestFunction sine(double amp, double omega, double phase, int dim) {
    return {FunctionKind::sine, {amp, omega, phase}, dim};
  }
};

/// Draws from the four input families. Centres lie in [-L/2, L/2]^n, radii ≤ L/3.
class FunctionSampler {
 public:
  FunctionSampler(std::uint64_t seed, int dim, double half_extent, bool nonnegative = true)
      : rng_(seed), dim_(dim), L_(half_extent), nonneg_(nonnegative) {}

  TestFunction next() {
    std::uniform_int_distribution<int> pick(0, 3);
    switch (pick(rng_)) {
      case 0: return TestFunction::bump(amplitude(), centre(), radius(), dim_);
      case 1: return TestFunction::cube_indicator(amplitude(), centre(), radius(), dim_);
      case 2: {
        std::uniform_int_distribution<int> s(0, 1);
        return TestFunction::power(amplitude(), centre(), s(rng_) ? 0.5 : -0.25, radius(), dim_);
      }
      default: return piecewise();
    }
  }

  TestFunction next_of(FunctionKind k) {
    switch (k) {
      case FunctionKind::bump: return TestFunction::bump(amplitude(), centre(), radius(), dim_);
      case FunctionKind::cube_indicator: return TestFunction::cube_indicator(amplitude(), centre(), radius(), dim_);
      case FunctionKind::power: return TestFunction::power(amplitude(), centre(), 0.5, radius(), dim_);
      case FunctionKind::piecewise: return piecewise();
      default: throw std::invalid_argument("FunctionSampler: not an input family");
    }
  }

  /// Symbols: Hölder powers |x-c|^δ and smooth sines.
  TestFunction symbol(double delta) {
    std::uniform_int_distribution<int> pick(0, 1);
    if (pick(rng_) == 0) return TestFunction::holder_power(uniform(0.5, 1.5), centre(), delta, dim_);
    return TestFunction::sine(uniform(0.5, 1.5), uniform(0.5, 2.0), uniform(0.0, 6.283185307179586), dim_);
  }

  std::vector<TestFunction> take(std::size_t count) {
    std::vector<TestFunction> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(next());
    return out;
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::mt19937_64& rng() { return rng_; }

 private:
  double amplitude() { return nonneg_ ? uniform(0.5, 2.0) : uniform(-2.0, 2.0); }
  double radius() { return uniform(L_ / 12.0, L_ / 3.0); }
  Point centre() { return {uniform(-L_ / 2, L_ / 2), dim_ > 1 ? uniform(-L_ / 2, L_ / 2) : 0.0}; }

  TestFunction piecewise() {
    TestFunction f{FunctionKind::piecewise, {amplitude(), L_}, dim_};
    const int blocks = dim_ == 1 ? 4 : 16;
    for (int k = 0; k < blocks; ++k) f.params.push_back(nonneg_ ? uniform(0.0, 1.0) : uniform(-1.0, 1.0));
    return f;
  }

  std::mt19937_64 rng_;
  int dim_;
  double L_;
  bool nonneg_;
};

}  // namespace vexan
