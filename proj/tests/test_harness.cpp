#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "vexan/harness.hpp"

using namespace vexan;

namespace {

ExperimentSpec quick(ExperimentKind k) {
  ExperimentSpec s;
  s.kind = k;
  s.resolutions = {16, 32};
  s.cases = 3;
  return s;
}

nlohmann::json strip_runtime(nlohmann::json j) {
  j.erase("runtime_ms");
  return j;
}

}  // namespace

TEST(Kinds, FifteenDistinctRoundTrip) {
  const auto& kinds = all_experiment_kinds();
  EXPECT_EQ(kinds.size(), 15u);
  std::set<std::string> names;
  for (auto k : kinds) {
    names.insert(to_string(k));
    EXPECT_EQ(*parse_experiment_kind(to_string(k)), k);
  }
  EXPECT_EQ(names.size(), 15u);
  EXPECT_FALSE(parse_experiment_kind("holder"));
}

TEST(Doubling, K0Arithmetic) {
  EXPECT_EQ(doubling_k0(2.5), 1);
  EXPECT_EQ(doubling_k0(1.5), 2);
  EXPECT_EQ(doubling_k0(1.1), 8);
  EXPECT_EQ(doubling_k0(2.0), 0);
  EXPECT_EQ(doubling_k0(1.0), 0);
}

TEST(Doubling, ConstantExponentFactorHolds) {
  // p ≡ 2: ‖χ_{aQ}‖_{p'} = a^{n/2}‖χ_Q‖_{p'}, so the least admissible a solves a^{1/2} ≤ a^{2-1/β}/2
  const UniformGrid g(BoxDomain(1, 2.0), 32);
  const double beta = 1.25;
  const auto d = find_doubling_parameters(ExponentField::constant(2.0), g, CubeFamily::all(), beta);
  ASSERT_TRUE(d.found);
  double expected = 0;
  for (int k = 11; k <= 40; ++k) {
    const double a = k / 10.0;
    if (doubling_k0(a) && std::sqrt(a) <= std::pow(a, 2 - 1 / beta) / 2 * (1 + 1e-9)) {
      expected = a;
      break;
    }
  }
  EXPECT_NEAR(d.a, expected, 1e-12);
  EXPECT_EQ(d.k0, doubling_k0(d.a));
  EXPECT_GT(d.tested_pairs, 0u);
}

TEST(Criteria, StableAndBounded) {
  using P = std::vector<ResolutionPoint>;
  EXPECT_TRUE(harness::stable(P{{16, 1.0}, {32, 1.09}, {64, 1.0}}, 0.1));
  EXPECT_FALSE(harness::stable(P{{16, 1.0}, {32, 1.2}}, 0.1));
  EXPECT_FALSE(harness::stable(P{{16, 1.0}, {32, NAN}}, 0.1));
  EXPECT_TRUE(harness::bounded(P{{16, 1.0}, {32, 0.5}, {64, 0.54}}, 0.1));
  EXPECT_FALSE(harness::bounded(P{{16, 1.0}, {32, 1.2}}, 0.1));
}

TEST(HolderIntegral, IndicatorPairsWithSquareExponent) {
  auto s = quick(ExperimentKind::holder_integral);
  s.inputs = "cube_indicator";
  s.exponents = {{"constant", {2.0}}};
  const auto r = run_experiment(s);
  EXPECT_EQ(r.status, "ok");
  EXPECT_TRUE(r.pass);
  // Cauchy-Schwarz with p = p' = 2
  EXPECT_LE(r.measured_constant, 1.0 + 1e-9);
}

TEST(Kolmogorov, ConstantFunctionGivesReciprocalConstant) {
  const UniformGrid g(BoxDomain(1, 1.0), 40);
  const Cube q{{5, 0}, 12};
  const auto f = GridFunction::sample(g, [](const Point&) { return 1.7; });
  const double p = 1.5, qq = 3.0, vol = q.volume(g);
  const double lhs = std::pow(vol, -1 / p) * lebesgue_norm(f, q, p);
  const double rhs = std::pow(qq / (qq - p), 1 / p) * std::pow(vol, -1 / qq) * weak_lebesgue_norm(f, q, qq);
  EXPECT_NEAR(lhs / rhs, std::pow((qq - p) / qq, 1 / p), 1e-10);
  EXPECT_LT(lhs / rhs, 1.0);
}

TEST(Suite, EmptyListPasses) {
  const auto r = run_suite({}, 4);
  EXPECT_TRUE(r.empty());
  EXPECT_TRUE(aggregate_pass(r));
}

TEST(Suite, DuplicatedSpecGivesIdenticalReports) {
  const auto s = quick(ExperimentKind::maximal_chain);
  const auto r = run_suite({s, s}, 2);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(strip_runtime(to_json(r[0])), strip_runtime(to_json(r[1])));
}

TEST(Suite, ParallelMatchesSerial) {
  const std::vector<ExperimentSpec> specs{quick(ExperimentKind::holder_product), quick(ExperimentKind::kolmogorov),
                                          quick(ExperimentKind::weight_identity), quick(ExperimentKind::frac_bound)};
  const auto a = run_suite(specs, 1), b = run_suite(specs, 3);
  for (std::size_t i = 0; i < specs.size(); ++i) EXPECT_EQ(strip_runtime(to_json(a[i])), strip_runtime(to_json(b[i])));
}

TEST(Suite, JsonlSchema) {
  const auto r = run_suite({quick(ExperimentKind::holder_integral), quick(ExperimentKind::kolmogorov),
                            quick(ExperimentKind::holder_orlicz)});
  std::stringstream ss;
  write_jsonl(r, ss);
  std::string line;
  int count = 0;
  while (std::getline(ss, line)) {
    const auto j = nlohmann::json::parse(line);
    for (const char* key : {"kind", "params", "measured_constant", "asserted_bound", "pass", "argmax", "resolutions",
                            "runtime_ms", "seed", "kernel", "status", "details"})
      EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_TRUE(j["pass"].is_boolean());
    EXPECT_TRUE(j["resolutions"].is_array());
    for (const auto& p : j["resolutions"]) {
      EXPECT_TRUE(p["N"].is_number_integer());
      EXPECT_TRUE(p["value"].is_number());
    }
    ++count;
  }
  EXPECT_EQ(count, 3);
  std::stringstream csv;
  write_summary_csv(r, csv);
  std::getline(csv, line);
  EXPECT_EQ(line, "kind,measured,bound,pass,status,resolutions");
}

TEST(Suite, PreconditionViolationIsErrorReport) {
  auto s = quick(ExperimentKind::holder_integral);
  s.exponents = {{"constant", {1.0}}};
  const auto r = run_experiment(s);
  EXPECT_EQ(r.status, "error");
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(r.details.contains("error"));
  auto t = quick(ExperimentKind::kolmogorov);
  t.resolutions = {32, 16};
  EXPECT_EQ(run_experiment(t).status, "error");
}

TEST(Suite, EveryKindRunsAtSmallScale) {
  for (auto k : all_experiment_kinds()) {
    auto s = quick(k);
    s.cases = 2;
    if (k == ExperimentKind::pointwise_sharp) s.resolutions = {12, 24};
    const auto r = run_experiment(s);
    EXPECT_EQ(r.status, "ok") << to_string(k) << ": " << r.details.dump();
    EXPECT_FALSE(r.resolutions.empty()) << to_string(k);
  }
}
