#include <gtest/gtest.h>

#include <random>

#include "pacing/generators.hpp"
#include "pacing/rmfup.hpp"
#include "pacing/rmvup.hpp"

namespace pacing {
namespace {

MarketInstance example() {
  return MarketInstance((Vector(2) << 6, 4).finished(), (Matrix(2, 1) << 10, 4).finished());
}

// Fixed-price revenue of one good at price p, straight from the definition.
double single_good_revenue(const MarketInstance& m, double p) {
  double demand = 0.0;
  for (int i = 0; i < m.buyers(); ++i) {
    if (m.value(i, 0) >= p) demand += m.budget(i);
  }
  return std::min(p, demand);
}

TEST(Rmfup, ExampleUnitPrice) {
  const FixedPriceResult r = solve_rmfup_single_good(example());
  EXPECT_NEAR(r.revenue, 6.0, 1e-9);
  EXPECT_NEAR(r.p(0), 6.0, 1e-9);
  EXPECT_TRUE(validate(example(), r.outcome, PricingMode::fixed).feasible());
}

TEST(Rmfup, SingleGoodBeatsDensePriceGrid) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 5;
    Vector b(n);
    Matrix v(n, 1);
    for (int i = 0; i < n; ++i) {
      b(i) = 0.1 + unit(rng);
      v(i, 0) = 2 * unit(rng);
    }
    const MarketInstance m(b, v);
    double grid = 0.0;
    for (int k = 0; k <= 20000; ++k) grid = std::max(grid, single_good_revenue(m, k * 1e-4));
    const FixedPriceResult r = solve_rmfup_single_good(m);
    EXPECT_GE(r.revenue, grid - 1e-12);
    EXPECT_NEAR(r.revenue, single_good_revenue(m, r.p(0)), 1e-9);
  }
}

TEST(Rmfup, SingleGoodRequiresOneGood) {
  const MarketInstance m((Vector(1) << 1).finished(), Matrix::Ones(1, 2));
  EXPECT_THROW(solve_rmfup_single_good(m), StructuralError);
}

TEST(Rmfup, LowerBoundFamilyEarnsN) {
  for (int n : {2, 5, 10, 50}) {
    EXPECT_NEAR(solve_rmfup_single_good(gen_lower_bound_family(n)).revenue, n, 1e-9);
  }
}

TEST(Rmfup, EnumerationPicksBestCandidate) {
  const FixedPriceResult r = solve_rmfup_enumerate(example(), {{4.0, 6.0, 10.0}});
  EXPECT_NEAR(r.revenue, 6.0, 1e-9);
  EXPECT_NEAR(r.p(0), 6.0, 1e-9);
}

TEST(Rmfup, EnumerationCapAndArity) {
  const MarketInstance m(Vector::Ones(2), Matrix::Ones(2, 11));
  EXPECT_THROW(solve_rmfup_enumerate(m, std::vector<std::vector<double>>(11, {0.1, 0.5, 1, 2})),
               EnumerationCapExceeded);
  EXPECT_THROW(solve_rmfup_enumerate(m, {{1.0}}), StructuralError);
}

TEST(Rmfup, ThreadedEnumerationMatchesSerial) {
  SuiteConfig config;
  config.seed = 4;
  config.min_goods = config.max_goods = 3;
  InstanceGenerator gen(config, 0);
  const MarketInstance m = gen.static_instance();
  const std::vector<std::vector<double>> cands(3, {0.1, 0.2, 0.35, 0.5, 0.7, 0.9});
  const FixedPriceResult a = solve_rmfup_enumerate(m, cands, kEnumerationCap, 1);
  const FixedPriceResult b = solve_rmfup_enumerate(m, cands, kEnumerationCap, 3);
  EXPECT_DOUBLE_EQ(a.revenue, b.revenue);
}

TEST(Rmfup, HeuristicIsFeasibleAndBelowVariablePrices) {
  SuiteConfig config;
  config.seed = 6;
  for (int k = 0; k < 15; ++k) {
    InstanceGenerator gen(config, k);
    const MarketInstance m = gen.static_instance();
    const FixedPriceResult h = solve_rmfup_heuristic(m);
    EXPECT_TRUE(validate(m, h.outcome, PricingMode::fixed).feasible());
    EXPECT_LE(h.revenue, solve_rmvup(m).revenue + 1e-7);
    if (m.goods() == 1) {
      EXPECT_NEAR(h.revenue, solve_rmfup_single_good(m).revenue, 1e-6);
    }
  }
}

TEST(AllocateGivenPrices, ExcludesBuyersPricedOut) {
  const Outcome o = allocate_given_prices(example(), (Vector(1) << 5.0).finished());
  EXPECT_DOUBLE_EQ(o.x(1, 0), 0.0);
  EXPECT_NEAR(o.x(0, 0), 1.0, 1e-9);
  EXPECT_NEAR(revenue(o), 5.0, 1e-9);
  EXPECT_THROW(allocate_given_prices(example(), Vector::Ones(2)), StructuralError);
}

}  // namespace
}  // namespace pacing
