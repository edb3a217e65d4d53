#include <gtest/gtest.h>

#include "pacing/market.hpp"

namespace pacing {
namespace {

MarketInstance two_by_two() {
  return MarketInstance((Vector(2) << 1.0, 2.0).finished(),
                        (Matrix(2, 2) << 1.0, 0.5, 0.0, 3.0).finished());
}

TEST(MarketInstance, RejectsMalformedData) {
  EXPECT_THROW(MarketInstance(Vector(0), Matrix(0, 1)), StructuralError);
  EXPECT_THROW(MarketInstance((Vector(2) << 1, 1).finished(), Matrix::Ones(3, 1)),
               StructuralError);
  EXPECT_THROW(MarketInstance((Vector(1) << -1).finished(), Matrix::Ones(1, 1)),
               StructuralError);
  EXPECT_THROW(MarketInstance((Vector(1) << 1).finished(), -Matrix::Ones(1, 1)),
               StructuralError);
  Matrix nan = Matrix::Ones(1, 1);
  nan(0, 0) = std::nan("");
  EXPECT_THROW(MarketInstance((Vector(1) << 1).finished(), nan), StructuralError);
}

TEST(MarketInstance, RestrictBuyersKeepsRowsInOrder) {
  const MarketInstance m = two_by_two();
  const MarketInstance sub = m.restrict_buyers({1}, (Vector(1) << 0.5).finished());
  EXPECT_EQ(sub.buyers(), 1);
  EXPECT_DOUBLE_EQ(sub.budget(0), 0.5);
  EXPECT_DOUBLE_EQ(sub.value(0, 1), 3.0);
}

TEST(Validate, FeasibleOutcomePasses) {
  const MarketInstance m = two_by_two();
  Outcome o = Outcome::zero(2, 2);
  o.x(0, 0) = 1.0;
  o.b(0, 0) = 1.0;
  o.x(1, 1) = 0.5;
  o.b(1, 1) = 1.5;
  const FeasibilityReport r = validate(m, o, PricingMode::variable);
  EXPECT_TRUE(r.feasible());
  EXPECT_DOUBLE_EQ(revenue(o), 2.5);
}

TEST(Validate, ReportsEachViolationKind) {
  const MarketInstance m = two_by_two();
  Outcome o = Outcome::zero(2, 2);
  o.x(0, 0) = 0.7;
  o.x(1, 0) = 0.6;  // oversold
  o.b(1, 0) = 0.1;  // value 0 on this good
  o.b(0, 1) = 1.5;  // over budget, no allocation
  o.x(1, 1) = -0.1;
  const FeasibilityReport r = validate(m, o, PricingMode::variable);
  EXPECT_TRUE(r.has(ConstraintKind::supply));
  EXPECT_TRUE(r.has(ConstraintKind::budget));
  EXPECT_TRUE(r.has(ConstraintKind::individual_rationality));
  EXPECT_TRUE(r.has(ConstraintKind::nonnegativity));
  EXPECT_NEAR(r.max_violation(), 1.5, 1e-12);
}

TEST(Validate, FixedModeNeedsPricesAndChecksThem) {
  const MarketInstance m = two_by_two();
  Outcome o = Outcome::zero(2, 2);
  EXPECT_THROW(validate(m, o, PricingMode::fixed), StructuralError);
  o.p = (Vector(2) << 0.8, 1.0).finished();
  o.x(0, 0) = 1.0;
  o.b(0, 0) = 0.5;
  const FeasibilityReport r = validate(m, o, PricingMode::fixed);
  EXPECT_TRUE(r.has(ConstraintKind::fixed_price));
}

TEST(Validate, DimensionMismatchIsStructural) {
  Outcome o = Outcome::zero(3, 2);
  EXPECT_THROW(validate(two_by_two(), o, PricingMode::variable), StructuralError);
}

TEST(LiquidWelfare, CapsValueAtBudget) {
  const MarketInstance m = two_by_two();
  Matrix x = Matrix::Zero(2, 2);
  x(0, 0) = 1.0;  // value 1 = budget
  x(1, 1) = 1.0;  // value 3 > budget 2
  EXPECT_DOUBLE_EQ(liquid_welfare(m, x), 3.0);
  EXPECT_DOUBLE_EQ(received_value(m, x)(1), 3.0);
}

}  // namespace
}  // namespace pacing
