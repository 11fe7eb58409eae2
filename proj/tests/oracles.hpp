// Independent reference computations for the tests. Deliberately naive:
// plain bisection, plain loops, no shared code paths with the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// Root of a monotone scalar function on [lo, hi] by bisection.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Least η with Σ_k cell·(|f_k|/η)^{p_k} ≤ 1.
inline double luxemburg(const std::vector<double>& f, const std::vector<double>& p, double cell) {
  double fmax = 0;
  for (double v : f) fmax = std::max(fmax, std::abs(v));
  if (fmax == 0) return 0;
  auto F = [&](double eta) {
    long double s = 0;
    for (std::size_t k = 0; k < f.size(); ++k)
      if (f[k] != 0) s += cell * std::pow(std::abs(f[k]) / eta, p[k]);
    return static_cast<double>(s) - 1.0;
  };
  double lo = fmax * 1e-6, hi = fmax;
  while (F(hi) > 0) hi *= 2;
  while (F(lo) < 0) lo /= 2;
  return bisect(F, lo, hi);
}

/// Simpson's rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
  return s * h / 3;
}

/// Young-function average: least λ with mean Φ(|v|/λ) ≤ 1.
inline double orlicz(const std::vector<double>& v, const std::function<double(double)>& phi) {
  double vmax = 0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  if (vmax == 0) return 0;
  auto F = [&](double lam) {
    double s = 0;
    for (double x : v) s += phi(std::abs(x) / lam);
    return s / v.size() - 1.0;
  };
  double lo = vmax * 1e-6, hi = vmax;
  while (F(hi) > 0) hi *= 2;
  while (F(lo) < 0) lo /= 2;
  return bisect(F, lo, hi);
}

}  // namespace oracle
