#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pacing/market.hpp"
#include "pacing/valuation.hpp"

namespace pacing {
namespace {

ConcaveValuation sqrt_shift() { return ConcaveValuation::shifted_power(1.0, 1.0, 0.5); }

ConcaveValuation two_slopes() {
  return ConcaveValuation::piecewise_linear({{0, 0}, {0.5, 1.0}, {1.5, 1.5}});
}

TEST(ConcaveValuation, RejectsInvalidParameters) {
  EXPECT_THROW(ConcaveValuation::linear(-1), StructuralError);
  EXPECT_THROW(ConcaveValuation::shifted_power(1, 1, 1.5), StructuralError);
  EXPECT_THROW(ConcaveValuation::shifted_power(1, -1, 0.5), StructuralError);
  EXPECT_THROW(ConcaveValuation::piecewise_linear({{0, 0}}), StructuralError);
  EXPECT_THROW(ConcaveValuation::piecewise_linear({{0, 1}, {1, 2}}), StructuralError);
  EXPECT_THROW(ConcaveValuation::piecewise_linear({{0, 0}, {1, 1}, {2, 3}}),
               StructuralError);  // convex
  EXPECT_THROW(ConcaveValuation::piecewise_linear({{0, 0}, {1, 1}, {2, 0.5}}),
               StructuralError);  // decreasing
}

TEST(ConcaveValuation, ValuesAndDerivatives) {
  const ConcaveValuation v = sqrt_shift();
  EXPECT_DOUBLE_EQ(v.value(0.0), 0.0);
  EXPECT_NEAR(v.value(3.0), 1.0, 1e-15);
  EXPECT_NEAR(v.derivative(0.0), 0.5, 1e-15);
  EXPECT_NEAR(v.derivative_at_one(), 0.5 / std::sqrt(2.0), 1e-15);
  for (double x : {0.1, 0.4, 0.9}) {
    const double h = 1e-6;
    EXPECT_NEAR(v.derivative(x), (v.value(x + h) - v.value(x - h)) / (2 * h), 1e-8);
    EXPECT_NEAR(v.second_derivative(x),
                (v.derivative(x + h) - v.derivative(x - h)) / (2 * h), 1e-6);
  }
  EXPECT_TRUE(std::isinf(ConcaveValuation::shifted_power(1, 0, 0.5).derivative(0.0)));
}

TEST(ConcaveValuation, PiecewiseLinearSubgradients) {
  const ConcaveValuation v = two_slopes();
  EXPECT_DOUBLE_EQ(v.value(0.25), 0.5);
  EXPECT_DOUBLE_EQ(v.value(1.0), 1.25);
  EXPECT_DOUBLE_EQ(v.value(2.5), 2.0);  // continues with the last slope
  const Subgradient kink = v.subgradient(0.5);
  EXPECT_DOUBLE_EQ(kink.lower, 0.5);
  EXPECT_DOUBLE_EQ(kink.upper, 2.0);
  const Subgradient inside = v.subgradient(0.2);
  EXPECT_DOUBLE_EQ(inside.lower, 2.0);
  EXPECT_DOUBLE_EQ(inside.upper, 2.0);
  EXPECT_DOUBLE_EQ(v.derivative_at_zero(), 2.0);
  EXPECT_DOUBLE_EQ(v.derivative_at_one(), 0.5);
}

TEST(ConcaveValuation, LinearInDisguise) {
  EXPECT_TRUE(ConcaveValuation::shifted_power(2, 1, 1.0).is_linear());
  EXPECT_TRUE(ConcaveValuation::piecewise_linear({{0, 0}, {1, 2}, {2, 4}}).is_linear());
  EXPECT_FALSE(two_slopes().is_linear());
  EXPECT_TRUE(ConcaveValuation().is_zero());
}

TEST(ConcaveValuation, ConjugateMatchesDenseGrid) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  const std::vector<ConcaveValuation> kinds = {
      ConcaveValuation::linear(0.7), sqrt_shift(),
      ConcaveValuation::shifted_power(2.0, 0.3, 0.3), two_slopes()};
  for (const auto& v : kinds) {
    for (int trial = 0; trial < 40; ++trial) {
      const double alpha = unit(rng);
      const double price = 2.5 * unit(rng);
      const double closed = v.conjugate(alpha, price);
      double grid = 0.0;
      for (int k = 0; k <= 200000; ++k) {
        const double x = 10.0 * k / 200000;
        grid = std::max(grid, alpha * v.value(x) - price * x);
      }
      if (std::isinf(closed)) {
        // Unbounded: the grid maximum sits at the right end and keeps growing.
        EXPECT_GT(alpha * v.value(10.0) - price * 10.0, 0.0) << v.describe();
      } else {
        EXPECT_NEAR(closed, grid, 1e-4) << v.describe() << " a=" << alpha << " p=" << price;
      }
    }
  }
}

TEST(ConcaveValuation, XDerivativeMonotonicity) {
  EXPECT_TRUE(sqrt_shift().x_derivative_nondecreasing());
  EXPECT_TRUE(ConcaveValuation::linear(1).x_derivative_nondecreasing());
  EXPECT_FALSE(two_slopes().x_derivative_nondecreasing());
  // Kink only beyond the unit interval.
  EXPECT_TRUE(ConcaveValuation::piecewise_linear({{0, 0}, {1, 1}, {2, 1.5}})
                  .x_derivative_nondecreasing());
}

TEST(ConcaveValuation, ScalingMultipliesValues) {
  const ConcaveValuation v = two_slopes().scaled(3.0);
  EXPECT_DOUBLE_EQ(v.value(1.0), 3.75);
  EXPECT_THROW(two_slopes().scaled(0.0), StructuralError);
}

}  // namespace
}  // namespace pacing
