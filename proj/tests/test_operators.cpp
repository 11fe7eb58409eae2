#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vexan/operators.hpp"

using namespace vexan;

namespace {

GridFunction random_function(const UniformGrid& g, std::uint64_t seed, double lo = -1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, 1.0);
  std::vector<double> v(g.size());
  for (auto& x : v) x = u(rng);
  return GridFunction(g, v);
}

}  // namespace

TEST(KernelSize, MollifiedAndFractionalBounded) {
  for (int m : {1, 2})
    for (int n : {1, 2}) {
      EXPECT_LE(kernel_size_check(make_mollified_cz_kernel(m, n, 0.1), 10000), 1.0 + 1e-12);
      EXPECT_LE(kernel_size_check(make_fractional_kernel(m, n, 0.5), 10000), 1.0 + 1e-12);
    }
}

TEST(KernelSize, ScalesLinearly) {
  const double a = kernel_size_check(make_mollified_cz_kernel(2, 1, 0.1), 5000);
  const double b = kernel_size_check(make_mollified_cz_kernel(2, 1, 0.1, 3.0), 5000);
  EXPECT_NEAR(b, 3 * a, 1e-12 * b);
}

TEST(KernelSmoothness, FiniteAndStableAsSamplesDouble) {
  for (int m : {1, 2})
    for (int n : {1, 2}) {
      const auto k = make_mollified_cz_kernel(m, n, 0.1);
      const auto a = kernel_smoothness_check(k, 10000), b = kernel_smoothness_check(k, 20000);
      ASSERT_TRUE(std::isfinite(a.A_x) && std::isfinite(a.A_y));
      EXPECT_GT(a.A_x, 0.0);
      EXPECT_NEAR(b.A_x, a.A_x, 0.1 * a.A_x);
      EXPECT_NEAR(b.A_y, a.A_y, 0.1 * a.A_y);
      EXPECT_LE(b.A_x, k.A_smooth_x);
      EXPECT_LE(b.A_y, k.A_smooth_y);
    }
}

TEST(KernelSmoothness, OneLinearLineHasSlopeTwo) {
  // K = (ρ + |x - y|)^{-1}: sup |∂_x K|·S² → 1 as ρ/S → 0, and (1.2) allows
  // |x - x'| up to S/2 where the secant ratio reaches 2
  const auto s = kernel_smoothness_check(make_mollified_cz_kernel(1, 1, 0.1), 10000);
  EXPECT_NEAR(s.A_x, 2.0, 0.01);
  EXPECT_NEAR(s.A_y, 2.0, 0.01);
}

TEST(Kernel, RejectsBadParameters) {
  EXPECT_THROW(make_mollified_cz_kernel(3, 1, 0.1), std::invalid_argument);
  EXPECT_THROW(make_mollified_cz_kernel(1, 1, 0.0), std::invalid_argument);
  EXPECT_THROW(make_fractional_kernel(1, 1, 1.0), std::invalid_argument);
  EXPECT_THROW(make_fractional_kernel(2, 1, 0.0), std::invalid_argument);
}

TEST(Kernel, PointEvaluation) {
  const auto k = make_mollified_cz_kernel(2, 1, 0.5);
  const Point ys[] = {{1.0, 0}, {-2.0, 0}};
  EXPECT_NEAR(k({0.5, 0}, ys), std::pow(0.5 + 0.5 + 2.5, -2.0), 1e-15);
  EXPECT_THROW(k({0, 0}, std::span<const Point>(ys, 1)), std::invalid_argument);
}

TEST(Multilinear, MatchesDirectDoubleSum) {
  const UniformGrid g(BoxDomain(1, 1.0), 24);
  const auto k = make_mollified_cz_kernel(2, 1, 0.2);
  const auto f1 = random_function(g, 1), f2 = random_function(g, 2);
  const auto T = apply_multilinear(k, {f1, f2});
  const double h = g.spacing();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.node(i)[0];
    double s = 0;
    for (std::size_t a = 0; a < g.size(); ++a)
      for (std::size_t b = 0; b < g.size(); ++b)
        s += std::pow(0.2 + std::abs(x - g.node(a)[0]) + std::abs(x - g.node(b)[0]), -2.0) * f1[a] * f2[b];
    EXPECT_NEAR(T[i], s * h * h, 1e-12 * std::abs(s * h * h) + 1e-14);
  }
}

TEST(Multilinear, IndicatorsMatchFineBruteForce) {
  // N/2 odd puts a node at 0.5 and cell faces at 0 and 1
  const UniformGrid g(BoxDomain(1, 1.0), 54);
  const double rho = 0.25;
  const auto k = make_mollified_cz_kernel(2, 1, rho);
  const auto chi = GridFunction::sample(g, [](const Point& x) { return x[0] > 0 && x[0] < 1 ? 1.0 : 0.0; });
  const auto T = apply_multilinear(k, {chi, chi});
  const std::size_t i = static_cast<std::size_t>(g.cell_of(0.5));
  ASSERT_NEAR(g.node(i)[0], 0.5, 1e-12);
  const int fine = 4 * 27;
  const double hf = 1.0 / fine;
  double s = 0;
  for (int a = 0; a < fine; ++a)
    for (int b = 0; b < fine; ++b)
      s += std::pow(rho + std::abs(0.5 - (a + 0.5) * hf) + std::abs(0.5 - (b + 0.5) * hf), -2.0);
  s *= hf * hf;
  EXPECT_NEAR(T[i], s, 0.02 * s);
}

TEST(Multilinear, NonnegativeInNonnegativeOut) {
  const UniformGrid g(BoxDomain(2, 1.0), 8);
  const auto k = make_mollified_cz_kernel(2, 2, 0.3);
  const auto T = apply_multilinear(k, {random_function(g, 3, 0.0), random_function(g, 4, 0.0)});
  for (double v : T.values()) EXPECT_GE(v, 0.0);
}

TEST(Multilinear, ZeroSlotGivesZero) {
  const UniformGrid g(BoxDomain(1, 1.0), 16);
  const auto T = apply_multilinear(make_mollified_cz_kernel(2, 1, 0.1), {GridFunction(g), random_function(g, 5)});
  for (double v : T.values()) EXPECT_EQ(v, 0.0);
}

TEST(Multilinear, EvenInputsGiveEvenOutput) {
  const UniformGrid g(BoxDomain(1, 1.0), 30);
  const auto e1 = GridFunction::sample(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  const auto e2 = GridFunction::sample(g, [](const Point& x) { return std::abs(x[0]) < 0.5 ? 1.0 : 0.2; });
  for (const auto& k : {make_mollified_cz_kernel(2, 1, 0.1), make_fractional_kernel(2, 1, 0.7)}) {
    const auto T = apply_multilinear(k, {e1, e2});
    for (std::size_t i = 0; i < 15; ++i) EXPECT_NEAR(T[i], T[29 - i], 1e-12 * std::abs(T[i]));
  }
}

TEST(Fractional, IndicatorConvergesToClosedForm) {
  // I_{1/2}χ_[-1,1](x) = 2√(1+x) + 2√(1-x)
  double prev = 1e300;
  for (int N : {64, 128, 256, 512}) {
    const UniformGrid g(BoxDomain(1, 2.0), N);
    const auto chi = GridFunction::sample(g, [](const Point& x) { return std::abs(x[0]) < 1 ? 1.0 : 0.0; });
    const auto I = fractional_integral(0.5, {chi});
    const std::size_t i = static_cast<std::size_t>(N / 2);
    const double x = g.node(i)[0];
    const double err = std::abs(I[i] - (2 * std::sqrt(1 + x) + 2 * std::sqrt(1 - x)));
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 0.06);
}

TEST(Fractional, BilinearProductStructure) {
  // far from the diagonal the m = 2 kernel is a plain double sum
  const UniformGrid g(BoxDomain(1, 2.0), 32);
  const auto a = GridFunction::sample(g, [](const Point& x) { return x[0] < -1.5 ? 1.0 : 0.0; });
  const auto b = GridFunction::sample(g, [](const Point& x) { return x[0] > 1.5 ? 1.0 : 0.0; });
  const auto I = fractional_integral(0.5, {a, b});
  const std::size_t i = 16;
  const double x = g.node(i)[0], h = g.spacing();
  double s = 0;
  for (std::size_t p = 0; p < g.size(); ++p)
    for (std::size_t q = 0; q < g.size(); ++q)
      if (a[p] != 0 && b[q] != 0) s += std::pow(std::abs(x - g.node(p)[0]) + std::abs(x - g.node(q)[0]), -1.5);
  EXPECT_NEAR(I[i], s * h * h, 1e-12 * s * h * h);
}
