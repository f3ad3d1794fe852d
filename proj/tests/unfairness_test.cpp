#include "fairflow/unfairness.hpp"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fairflow/fixtures.hpp"

using namespace fairflow;

namespace {

constexpr double kExact = 1e-9;

NashBaseline baseline_of(const fixtures::FixtureOracle& fx) { return baseline_from_flow(fx.instance, fx.nash_flow, 1e-6); }

}  // namespace

TEST(Ratio, Conventions) {
  EXPECT_DOUBLE_EQ(unfairness_ratio(0.0, 0.0), 1.0);
  EXPECT_TRUE(std::isinf(unfairness_ratio(2.0, 0.0)));
  EXPECT_DOUBLE_EQ(unfairness_ratio(3.0, 2.0), 1.5);
}

TEST(Measures, SeriesDecompositionsDifferInLoadedUnfairness) {
  const auto fx = fixtures::pigou_series(1.0);
  const NashBaseline nash = baseline_of(fx);
  EXPECT_NEAR(nash.latency[0], 2.0, kExact);

  const auto a = measure(fx.instance, fx.flows.at("decomposition_a"), nash, 1e-6);
  const auto b = measure(fx.instance, fx.flows.at("decomposition_b"), nash, 1e-6);
  EXPECT_NEAR(a.loaded, 2.0, kExact);
  EXPECT_NEAR(b.loaded, 1.0, kExact);
  EXPECT_NEAR(a.ue, 1.0, kExact);
  EXPECT_NEAR(b.ue, 0.75, kExact);
  EXPECT_NEAR(a.loaded, fx.value("decomposition_a_loaded"), kExact);
  EXPECT_NEAR(b.ue, fx.value("decomposition_b_ue"), kExact);
}

TEST(Measures, BraessOuterPaths) {
  const auto fx = fixtures::braess(1.0);
  PathFlow f(1);
  f.add(0, {0, 2}, 0.5);
  f.add(0, {1, 3}, 0.5);
  const auto r = measure(fx.instance, f, baseline_of(fx), 1e-6);
  EXPECT_NEAR(r.loaded, 1.0, kExact);
  EXPECT_NEAR(r.ue, 0.75, kExact);
  EXPECT_NEAR(r.average, 1.0, kExact);
}

TEST(Measures, MultiCommodityOptimumIsLoadedFairButNotUeFair) {
  const auto fx = fixtures::multi_commodity();
  const NashBaseline nash = baseline_of(fx);
  EXPECT_NEAR(nash.latency[0], 1.0, kExact);
  const auto r = measure(fx.instance, fx.system_flow, nash, 1e-6);
  EXPECT_NEAR(r.ue, 1.5, kExact);
  EXPECT_NEAR(r.loaded, 1.0, kExact);
  EXPECT_NEAR(total_cost(fx.instance, fx.system_flow), 0.9375, kExact);
  EXPECT_NEAR(r.commodities[0].ue, 1.5, kExact);
  EXPECT_NEAR(r.commodities[1].ue, 0.75, kExact);
}

TEST(Measures, PigouLinearOptimum) {
  const auto fx = fixtures::pigou(LatencyFn::affine(1, 0), 1.5, 1.0);
  const auto r = measure(fx.instance, fx.system_flow, baseline_of(fx), 1e-6);
  EXPECT_NEAR(total_cost(fx.instance, fx.system_flow), 0.9375, kExact);
  EXPECT_NEAR(r.loaded, 2.0, kExact);
  EXPECT_NEAR(r.average, 1.25, kExact);
  EXPECT_NEAR(r.ue, 1.5, kExact);
}

TEST(Measures, UeAndAverageAreUnordered) {
  const double eps = 1e-3;
  for (int n : {1, 2, 4}) {
    // Cheap constant link: average unfairness close to n + 1, UE unfairness 1.
    const auto low = fixtures::pigou(LatencyFn::monomial(1.0, n), eps, 1.0);
    const auto rl = measure(low.instance, low.system_flow, baseline_of(low), 1e-9);
    const double x = std::pow(eps / (n + 1), 1.0 / n);
    EXPECT_NEAR(rl.average, (n + 1) - n * x, 1e-9);
    EXPECT_NEAR(rl.ue, 1.0, 1e-9);
    EXPECT_GT(rl.average, rl.ue);

    // Expensive constant link: the reverse.
    const double c = (n + 1) * (1 - eps);
    const auto high = fixtures::pigou(LatencyFn::monomial(1.0, n), c, 1.0);
    const auto rh = measure(high.instance, high.system_flow, baseline_of(high), 1e-9);
    EXPECT_NEAR(rh.average, (n + 1) - n * std::pow(1 - eps, 1.0 / n), 1e-9);
    EXPECT_NEAR(rh.ue, c, 1e-9);
    EXPECT_LT(rh.average, rh.ue);
  }
}

TEST(Measures, FixtureOraclesAgree) {
  for (const std::string& name : fixtures::fixture_names()) {
    const auto fx = fixtures::by_name(name);
    const auto r = measure(fx.instance, fx.system_flow, baseline_of(fx), 1e-9);
    if (fx.values.count("system_loaded")) EXPECT_NEAR(r.loaded, fx.value("system_loaded"), kExact) << name;
    if (fx.values.count("system_average")) EXPECT_NEAR(r.average, fx.value("system_average"), kExact) << name;
    if (fx.values.count("system_ue")) EXPECT_NEAR(r.ue, fx.value("system_ue"), kExact) << name;
    EXPECT_LE(r.average, r.loaded + kExact) << name;
  }
}

TEST(Measures, SingleUsedPathIsFair) {
  const auto fx = fixtures::pigou(LatencyFn::affine(1, 0), 1.0, 1.0);
  const auto r = measure(fx.instance, fx.nash_flow, baseline_of(fx), 1e-6);
  EXPECT_DOUBLE_EQ(r.loaded, 1.0);
  EXPECT_DOUBLE_EQ(r.average, 1.0);
  EXPECT_DOUBLE_EQ(r.ue, 1.0);
  EXPECT_EQ(r.commodities[0].used_paths, 1u);
}

TEST(Measures, ZeroLatencyConventions) {
  // Both links free at every load: every ratio is 0/0.
  const Instance inst(2, {{0, 1, LatencyFn::constant(0)}, {0, 1, LatencyFn::constant(0)}}, {{0, 1, 1.0}});
  PathFlow f(1);
  f.add(0, {0}, 0.5);
  f.add(0, {1}, 0.5);
  const auto r = measure(inst, f, NashBaseline{{0.0}, {0.0}}, 1e-6);
  EXPECT_DOUBLE_EQ(r.loaded, 1.0);
  EXPECT_DOUBLE_EQ(r.ue, 1.0);

  // A free link next to a costly one: positive / 0.
  const Instance mixed(2, {{0, 1, LatencyFn::constant(0)}, {0, 1, LatencyFn::constant(1)}}, {{0, 1, 1.0}});
  const auto m = measure(mixed, f, NashBaseline{{0.0}, {0.0}}, 1e-6);
  EXPECT_TRUE(std::isinf(m.loaded));
  EXPECT_TRUE(std::isinf(m.ue));
}

TEST(Measures, BaselineMustCoverEveryCommodity) {
  const auto fx = fixtures::multi_commodity();
  EXPECT_THROW(ue_unfairness(fx.instance, fx.system_flow, NashBaseline{{1.0}, {0.0}}, 1e-6), std::invalid_argument);
}

TEST(Measures, AggregatesAreMaxAndMean) {
  const auto fx = fixtures::multi_commodity();
  const auto ue = ue_unfairness(fx.instance, fx.system_flow, baseline_of(fx), 1e-6);
  EXPECT_NEAR(ue.aggregate, 1.5, kExact);
  EXPECT_NEAR(ue.mean, (1.5 + 0.75) / 2, kExact);
}

TEST(BoundCheck, PolynomialClass) {
  const auto fx = fixtures::pigou(LatencyFn::monomial(1.0, 4), 1e-6, 1.0);
  const auto r = measure(fx.instance, fx.system_flow, baseline_of(fx), 1e-9);
  const BoundCheck ok = bound_check(fx.instance, r, 4);
  EXPECT_TRUE(ok.latencies_in_class);
  EXPECT_TRUE(ok.within_bound);
  EXPECT_DOUBLE_EQ(ok.bound, 5.0);
  const BoundCheck low = bound_check(fx.instance, r, 1);
  EXPECT_FALSE(low.latencies_in_class);
}
