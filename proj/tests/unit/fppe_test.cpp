#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pacing/fppe.hpp"
#include "pacing/generators.hpp"
#include "pacing/io.hpp"
#include "pacing/rmvup.hpp"

namespace pacing {
namespace {

MarketInstance example() {
  return MarketInstance((Vector(2) << 6, 4).finished(), (Matrix(2, 1) << 10, 4).finished());
}

// Single-good equilibrium price: the largest p <= max v with
// sum of budgets of buyers valuing at least p >= p.
double single_good_price(const MarketInstance& m) {
  std::vector<int> order(m.buyers());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return m.value(a, 0) > m.value(b, 0); });
  double best = 0.0;
  double budget = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double v = m.value(order[k], 0);
    budget += m.budget(order[k]);
    if (k + 1 < order.size() && m.value(order[k + 1], 0) == v) continue;
    const double next = k + 1 < order.size() ? m.value(order[k + 1], 0) : 0.0;
    const double p = std::min(v, budget);
    if (p >= next) best = std::max(best, p);
  }
  return best;
}

TEST(Fppe, ExampleEquilibrium) {
  const FppeOutcome f = solve_fppe(example());
  EXPECT_NEAR(f.p(0), 6.0, 1e-9);
  EXPECT_NEAR(f.alpha(0), 0.6, 1e-9);
  EXPECT_NEAR(f.alpha(1), 1.0, 1e-9);
  EXPECT_NEAR(f.x(0, 0), 1.0, 1e-9);
  EXPECT_NEAR(f.b.sum(), 6.0, 1e-9);
  EXPECT_LE(max_residual(f.residuals), 1e-9);
  EXPECT_LE(std::abs(f.gap), 1e-9);
}

TEST(Fppe, MatchesSingleGoodClosedForm) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 80; ++trial) {
    const int n = 1 + trial % 6;
    Vector b(n);
    Matrix v(n, 1);
    for (int i = 0; i < n; ++i) {
      b(i) = 0.05 + unit(rng);
      v(i, 0) = trial % 5 == 0 ? std::round(3 * unit(rng)) : 2 * unit(rng);
    }
    const MarketInstance m(b, v);
    const FppeOutcome f = solve_fppe(m);
    EXPECT_NEAR(f.p(0), single_good_price(m), 1e-7) << dump_instance(m);
  }
}

TEST(Fppe, LowerBoundFamilyRevenue) {
  for (int n : {2, 5, 10, 50}) {
    const FppeOutcome f = solve_fppe(gen_lower_bound_family(n));
    EXPECT_NEAR(f.b.sum(), n, 1e-6) << "n=" << n;
    EXPECT_NEAR(f.p(0), n, 1e-6);
  }
}

TEST(Fppe, ZeroBudgetAndIndifferentBuyers) {
  // Buyer 1 has no budget, buyer 2 values nothing.
  const MarketInstance m((Vector(3) << 1, 0, 2).finished(),
                         (Matrix(3, 2) << 1, 2, 5, 5, 0, 0).finished());
  const FppeOutcome f = solve_fppe(m);
  EXPECT_DOUBLE_EQ(f.alpha(1), 0.0);
  EXPECT_DOUBLE_EQ(f.alpha(2), 1.0);
  EXPECT_DOUBLE_EQ(f.x.row(1).sum(), 0.0);
  EXPECT_DOUBLE_EQ(f.x.row(2).sum(), 0.0);
  EXPECT_LE(max_residual(f.residuals), 1e-7);
}

TEST(Fppe, RoundOffBudgetBehavesAsZero) {
  const MarketInstance m((Vector(3) << 5.551115123125783e-17, 0.26, 0.95).finished(),
                         (Matrix(3, 2) << 0.75, 0, 0.23, 0.17, 0.38, 0.85).finished());
  const FppeOutcome f = solve_fppe(m);
  EXPECT_DOUBLE_EQ(f.alpha(0), 0.0);
  EXPECT_TRUE(std::isfinite(f.gap));
  EXPECT_LE(max_residual(f.residuals), 1e-9);
}

TEST(Fppe, UnwantedGoodHasZeroPrice) {
  const MarketInstance m((Vector(1) << 1).finished(), (Matrix(1, 2) << 2, 0).finished());
  const FppeOutcome f = solve_fppe(m);
  EXPECT_NEAR(f.p(0), 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(f.p(1), 0.0);
}

TEST(Fppe, DistinctStartsAgreeOnPrices) {
  SuiteConfig config;
  config.seed = 9;
  for (int k = 0; k < 30; ++k) {
    InstanceGenerator gen(config, k);
    const MarketInstance m = gen.static_instance();
    FppeOptions perturbed;
    perturbed.start = FppeStart::perturbed;
    perturbed.seed = 100 + k;
    const FppeOutcome a = solve_fppe(m);
    const FppeOutcome b = solve_fppe(m, perturbed);
    EXPECT_LE((a.p - b.p).lpNorm<Eigen::Infinity>(), 1e-5);
    EXPECT_LE(max_residual(b.residuals), 1e-6);
  }
}

TEST(Fppe, RevenueEqualsLiquidWelfareAndHalvesRmvup) {
  SuiteConfig config;
  config.seed = 10;
  for (int k = 0; k < 30; ++k) {
    InstanceGenerator gen(config, k);
    const MarketInstance m = gen.static_instance();
    const FppeCertificate cert = fppe_revenue_certificate(m);
    EXPECT_GE(cert.ratio, 0.5 - 1e-6);
    EXPECT_NEAR(cert.fppe_revenue, cert.liquid_welfare, 1e-6);
  }
}

TEST(Fppe, EveryBuyerMaximizesUtilityAtEquilibriumPrices) {
  SuiteConfig config;
  config.seed = 12;
  for (int k = 0; k < 20; ++k) {
    InstanceGenerator gen(config, k);
    const MarketInstance m = gen.static_instance();
    const FppeOutcome f = solve_fppe(m);
    for (int i = 0; i < m.buyers(); ++i) {
      // Paced buyers spend everything; unpaced ones buy only at their value.
      if (f.alpha(i) < 1.0 - 1e-9) {
        EXPECT_NEAR(f.b.row(i).sum(), m.budget(i), 1e-6);
      } else {
        EXPECT_LE(utility_gap(m, f.x, f.p, i), 1e-6);
      }
    }
  }
}

TEST(VerifyFppe, DetectsEachBrokenProperty) {
  const MarketInstance m = example();
  const FppeOutcome good = solve_fppe(m);
  auto broken = [&](auto edit) {
    FppeOutcome c = good;
    edit(c);
    c.b = c.x * c.p.asDiagonal();
    return verify_fppe(m, c);
  };
  EXPECT_GT(broken([](FppeOutcome& c) { c.x(1, 0) = 0.5; })[0], 0.1);  // oversold
  EXPECT_GT(broken([](FppeOutcome& c) { c.p(0) = 7; c.alpha(0) = 0.7; })[1], 0.1);
  EXPECT_GT(broken([](FppeOutcome& c) { c.x(0, 0) = 0.5; c.x(1, 0) = 0.5; })[2], 0.1);
  EXPECT_GT(broken([](FppeOutcome& c) { c.p(0) = 5; })[3], 0.1);
  EXPECT_GT(broken([](FppeOutcome& c) { c.x(0, 0) = 0.5; })[4], 0.1);
  EXPECT_GT(broken([](FppeOutcome& c) { c.alpha(1) = 0.5; })[5], 0.1);
  FppeOutcome wrong = good;
  wrong.p = Vector::Zero(2);
  EXPECT_THROW(verify_fppe(m, wrong), StructuralError);
}

TEST(Fppe, IterationCapRaisesConvergenceError) {
  FppeOptions options;
  options.max_iterations = 1;
  const MarketInstance m((Vector(3) << 1, 0.7, 0.4).finished(),
                         (Matrix(3, 3) << 1, 0.3, 0.8, 0.2, 0.9, 0.5, 0.6, 0.6, 0.1).finished());
  try {
    solve_fppe(m, options);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.residuals().size(), 6u);
  }
}

TEST(Fppe, DualityGapVanishesOnlyAtEquilibrium) {
  const MarketInstance m = example();
  const FppeOutcome f = solve_fppe(m);
  EXPECT_NEAR(eg_duality_gap(m, f), 0.0, 1e-9);
  FppeOutcome off = f;
  off.alpha(0) = 0.5;
  off.p(0) = 5.0;
  off.b = off.x * off.p.asDiagonal();
  EXPECT_GT(eg_duality_gap(m, off), 1e-3);
}

}  // namespace
}  // namespace pacing
