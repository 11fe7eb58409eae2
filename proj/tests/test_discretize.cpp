#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "vexan/discretize.hpp"

using namespace vexan;

TEST(Integrate, ConstantIsExact) {
  const UniformGrid g(BoxDomain(1, 1.0), 8);
  EXPECT_DOUBLE_EQ(integrate(GridFunction::sample(g, [](const Point&) { return 1.0; })), 2.0);
}

TEST(Integrate, OddFunctionVanishes) {
  const UniformGrid g(BoxDomain(1, 1.0), 37);
  EXPECT_NEAR(integrate(GridFunction::sample(g, [](const Point& x) { return x[0]; })), 0.0, 1e-12);
}

TEST(Integrate, SquareConvergesAtSecondOrder) {
  // midpoint error for x² on [-1,1] is exactly -h²/6
  double prev = 0.0;
  for (int N : {16, 32, 64, 128}) {
    const UniformGrid g(BoxDomain(1, 1.0), N);
    const double err = std::abs(integrate(GridFunction::sample(g, [](const Point& x) { return x[0] * x[0]; })) - 2.0 / 3.0);
    if (prev > 0.0) {
      EXPECT_NEAR(prev / err, 4.0, 1e-6);
    }
    prev = err;
  }
}

TEST(Integrate, TwoDimensionalProduct) {
  const UniformGrid g(BoxDomain(2, 1.0), 40);
  const double v = integrate(GridFunction::sample(g, [](const Point& x) { return std::cos(x[0]) * std::cos(x[1]); }));
  EXPECT_NEAR(v, std::pow(2 * std::sin(1.0), 2), 1e-3);
}

TEST(CubeAverage, Constants) {
  const UniformGrid g(BoxDomain(2, 1.0), 8);
  const auto c = GridFunction::sample(g, [](const Point&) { return 3.5; });
  const Cube q{{1, 2}, 3};
  EXPECT_DOUBLE_EQ(cube_average(c, q), 3.5);
  EXPECT_DOUBLE_EQ(cube_average(indicator(g, q), q), 1.0);
}

TEST(CubeAverage, LinearEqualsCentreValue) {
  const UniformGrid g(BoxDomain(2, 1.0), 16);
  const auto f = GridFunction::sample(g, [](const Point& x) { return 2 * x[0] - 3 * x[1] + 0.5; });
  for (const Cube& q : {Cube{{0, 0}, 4}, Cube{{3, 7}, 5}, Cube{{10, 1}, 6}}) {
    const Point c = q.center(g);
    EXPECT_NEAR(cube_average(f, q), 2 * c[0] - 3 * c[1] + 0.5, 1e-12);
  }
}

TEST(Enumerate, AllGridCubesCount) {
  for (int N : {4, 7, 10}) {
    const UniformGrid g(BoxDomain(1, 1.0), N);
    EXPECT_EQ(enumerate_cubes(g, CubeFamily::all()).size(), static_cast<std::size_t>(N * (N + 1) / 2));
  }
  const UniformGrid g2(BoxDomain(2, 1.0), 5);
  std::size_t expected = 0;
  for (int s = 1; s <= 5; ++s) expected += static_cast<std::size_t>((5 - s + 1) * (5 - s + 1));
  EXPECT_EQ(enumerate_cubes(g2, CubeFamily::all()).size(), expected);
}

TEST(Enumerate, DyadicCount) {
  const UniformGrid g(BoxDomain(1, 1.0), 4);
  const auto cubes = enumerate_cubes(g, CubeFamily::dyadic());
  ASSERT_EQ(cubes.size(), 7u);
  int by_side[5] = {};
  for (const auto& q : cubes) {
    ++by_side[q.side];
    EXPECT_EQ(q.anchor[0] % q.side, 0);
  }
  EXPECT_EQ(by_side[1], 4);
  EXPECT_EQ(by_side[2], 2);
  EXPECT_EQ(by_side[4], 1);
}

TEST(Enumerate, UnitCellsOnly) {
  const UniformGrid g(BoxDomain(2, 1.0), 6);
  const auto cubes = enumerate_cubes(g, CubeFamily::all(1));
  ASSERT_EQ(cubes.size(), 36u);
  for (const auto& q : cubes) EXPECT_EQ(q.side, 1);
}

TEST(Containing, CentreIncludesFullDomain) {
  const UniformGrid g(BoxDomain(2, 1.0), 6);
  const auto cubes = cubes_containing(g, {0, 0}, CubeFamily::all());
  EXPECT_NE(std::find(cubes.begin(), cubes.end(), Cube{{0, 0}, 6}), cubes.end());
}

TEST(Containing, CornerCell) {
  const UniformGrid g(BoxDomain(2, 1.0), 6);
  const Point x = g.node(Index{0, 0});
  for (const auto& q : cubes_containing(g, x, CubeFamily::all())) EXPECT_TRUE(q.contains_cell({0, 0}, 2));
}

TEST(Containing, BruteForceCountAtOrigin) {
  const UniformGrid g(BoxDomain(1, 1.0), 4);
  // closed intervals [a, b] with a ≤ 0 ≤ b on the breakpoints -1, -0.5, 0, 0.5, 1
  int count = 0;
  for (int a = 0; a <= 4; ++a)
    for (int b = a + 1; b <= 4; ++b)
      if (-1 + 0.5 * a <= 0 && -1 + 0.5 * b >= 0) ++count;
  EXPECT_EQ(cubes_containing(g, {0, 0}, CubeFamily::all()).size(), static_cast<std::size_t>(count));
  EXPECT_THROW(cubes_containing(g, {2, 0}, CubeFamily::all()), std::out_of_range);
}

TEST(GeomCube, OverlapWeightsSumToVolume) {
  const UniformGrid g(BoxDomain(2, 1.0), 10);
  const GeomCube q{{0.13, -0.27}, 0.61};
  double vol = 0;
  for (const auto& w : overlap_weights(g, q)) vol += w.volume;
  EXPECT_NEAR(vol, 0.61 * 0.61, 1e-14);
  const auto f = GridFunction::sample(g, [](const Point& x) { return 1 + x[0]; });
  // piecewise constant f: the average is the overlap-weighted mean of cell values
  double s = 0;
  for (const auto& w : overlap_weights(g, q)) s += w.volume * f[w.cell];
  EXPECT_NEAR(geom_average(f, q), s / (0.61 * 0.61), 1e-14);
}

TEST(GridFunction, RejectsMismatchAndNonFinite) {
  const UniformGrid g(BoxDomain(1, 1.0), 4);
  EXPECT_THROW(GridFunction(g, {1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(GridFunction(g, {1, 2, 3, NAN}), std::domain_error);
  EXPECT_THROW(UniformGrid(BoxDomain(1, 1.0), 2), std::invalid_argument);
  EXPECT_THROW(BoxDomain(3, 1.0), std::invalid_argument);
}

TEST(GridFunction, CsvRoundTrip) {
  const UniformGrid g(BoxDomain(2, 1.5), 5);
  const auto f = GridFunction::sample(g, [](const Point& x) { return std::sin(x[0]) + x[1] / 3; });
  std::stringstream ss;
  write_csv(f, ss);
  const auto h = read_csv(ss);
  EXPECT_TRUE(h.grid() == g);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(h[k], f[k]);
  std::stringstream bad("1\n4\n1\n1\n2\n");
  EXPECT_THROW(read_csv(bad), std::runtime_error);
}
