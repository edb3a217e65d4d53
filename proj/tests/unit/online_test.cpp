#include <gtest/gtest.h>

#include <cmath>

#include "pacing/generators.hpp"
#include "pacing/online.hpp"
#include "pacing/rmvup.hpp"

namespace pacing {
namespace {

OnlineInstance two_rounds() {
  return OnlineInstance(2, 2, {{2.0, 1, 1, (Vector(2) << 8, 1).finished()},
                               {6.0, 1, 2, (Vector(2) << 2, 0).finished()},
                               {4.0, 2, 2, (Vector(2) << 1, 5).finished()}});
}

// Reveals a fixed instance and records what the simulator has seen.
class RecordingSource final : public ArrivalSource {
 public:
  explicit RecordingSource(OnlineInstance inst) : inst_(std::move(inst)) {}
  int horizon() const override { return inst_.horizon(); }
  int goods() const override { return inst_.goods(); }
  int max_buyers() const override { return inst_.buyers(); }
  std::vector<std::pair<int, OnlineBuyer>> reveal(int round,
                                                  const OnlineTrace& history) override {
    rounds_seen.push_back(static_cast<int>(history.rounds.size()));
    std::vector<std::pair<int, OnlineBuyer>> out;
    for (int i = 0; i < inst_.buyers(); ++i) {
      if (inst_.buyer(i).arrival == round) out.emplace_back(i, inst_.buyer(i));
    }
    return out;
  }
  std::vector<int> rounds_seen;

 private:
  OnlineInstance inst_;
};

TEST(Online, TwoRoundExample) {
  const OnlineTrace t = run_online_fppe(two_rounds());
  EXPECT_NEAR(t.revenue, 8.25, 1e-7);
  EXPECT_NEAR(solve_rmvup(flatten_offline(two_rounds())).revenue, 9.75, 1e-7);
  ASSERT_EQ(t.rounds.size(), 2u);
  EXPECT_EQ(t.rounds[0].active, (std::vector<int>{0, 1}));
  EXPECT_EQ(t.rounds[1].active, (std::vector<int>{1, 2}));
}

TEST(Online, FlattenPlacesRoundsSideBySide) {
  const MarketInstance flat = flatten_offline(two_rounds());
  ASSERT_EQ(flat.goods(), 4);
  EXPECT_DOUBLE_EQ(flat.value(0, 0), 8);
  EXPECT_DOUBLE_EQ(flat.value(0, 2), 0);  // gone by round 2
  EXPECT_DOUBLE_EQ(flat.value(1, 2), 2);
  EXPECT_DOUBLE_EQ(flat.value(2, 0), 0);  // not yet arrived
  EXPECT_DOUBLE_EQ(flat.value(2, 3), 5);
}

TEST(Online, BudgetsCarryOverMinusSpend) {
  const OnlineTrace t = run_online_fppe(two_rounds());
  Vector spent = Vector::Zero(3);
  for (const auto& r : t.rounds) spent += r.outcome.b.rowwise().sum();
  EXPECT_LE((t.final_budgets - (t.initial_budgets - spent)).lpNorm<Eigen::Infinity>(), 1e-12);
  EXPECT_NEAR(t.rounds[1].budgets(1), 6.0 - t.rounds[0].outcome.b.row(1).sum(), 1e-12);
  EXPECT_NEAR(spent.sum(), t.revenue, 1e-9);
}

TEST(Online, SimulatorAsksOncePerRoundWithHistorySoFar) {
  RecordingSource source(two_rounds());
  const OnlineTrace t = run_online_fppe(source);
  EXPECT_EQ(source.rounds_seen, (std::vector<int>{0, 1}));
  EXPECT_NEAR(t.revenue, 8.25, 1e-7);
}

TEST(Online, AdversaryReactsToRoundOne) {
  AdversarialArrivals adversary;
  const OnlineTrace t = run_online_fppe(adversary);
  const bool below_half = t.rounds[0].outcome.x(1, 0) < 0.5;
  EXPECT_EQ(adversary.arrival_triggered(), below_half);
  EXPECT_EQ(t.revealed[2], below_half);
  EXPECT_NEAR(t.revenue / adversarial_instance(t.rounds[0].outcome.x(1, 0)).offline,
              1.0 / std::sqrt(2.0), 1e-7);
}

TEST(Online, AdversaryBranchesShareTheRatio) {
  const double target = (2.0 + std::sqrt(2.0)) / 4.0;
  const AdversaryBranch in = adversarial_instance(0.2);
  const AdversaryBranch out = adversarial_instance(0.8);
  EXPECT_TRUE(in.arrival);
  EXPECT_FALSE(out.arrival);
  EXPECT_NEAR(in.ratio, target, 1e-9);
  EXPECT_NEAR(out.ratio, target, 1e-9);
  EXPECT_NEAR(in.offline, 2.0 * (1.0 + std::sqrt(2.0)), 1e-9);
  EXPECT_NEAR(out.offline, 2.0 + std::sqrt(2.0), 1e-9);
  EXPECT_THROW(adversarial_instance(-0.1), StructuralError);
  EXPECT_THROW(adversarial_instance(1.5), StructuralError);
}

TEST(Online, RandomInstancesKeepQuarterOfOffline) {
  SuiteConfig config;
  config.seed = 31;
  config.max_buyers = 5;
  config.max_goods = 3;
  config.max_rounds = 4;
  for (int k = 0; k < 20; ++k) {
    InstanceGenerator gen(config, k);
    const OnlineInstance inst = gen.online_instance();
    const CompetitiveRatio r = competitive_ratio(inst);
    EXPECT_GE(r.ratio, 0.25);
    const ComparisonReport c = comparison_checks(inst);
    EXPECT_TRUE(c.timewise_ok && c.buyerwise_ok)
        << (c.violations.empty() ? "" : c.violations.front());
  }
}

TEST(Online, PacingMonotoneInBudgets) {
  const MarketInstance m((Vector(3) << 1, 0.7, 0.4).finished(),
                         (Matrix(3, 2) << 1, 0.3, 0.2, 0.9, 0.6, 0.6).finished());
  EXPECT_TRUE(pacing_monotonicity_check(m, (Vector(3) << 0.5, 0, 0.2).finished()));
  EXPECT_THROW(pacing_monotonicity_check(m, (Vector(3) << -0.1, 0, 0).finished()),
               StructuralError);
}

TEST(OnlineInstance, RejectsMalformedInput) {
  const Vector v = Vector::Ones(1);
  EXPECT_THROW(OnlineInstance(0, 1, {{1, 1, 1, v}}), StructuralError);
  EXPECT_THROW(OnlineInstance(1, 0, {{1, 1, 1, Vector()}}), StructuralError);
  EXPECT_THROW(OnlineInstance(1, 1, {}), StructuralError);
  EXPECT_THROW(OnlineInstance(1, 1, {{-1, 1, 1, v}}), StructuralError);
  EXPECT_THROW(OnlineInstance(2, 1, {{1, 2, 1, v}}), StructuralError);
  EXPECT_THROW(OnlineInstance(2, 1, {{1, 1, 3, v}}), StructuralError);
  EXPECT_THROW(OnlineInstance(1, 1, {{1, 1, 1, Vector::Ones(2)}}), StructuralError);
  EXPECT_THROW(OnlineInstance(1, 1, {{1, 1, 1, -v}}), StructuralError);
}

}  // namespace
}  // namespace pacing
