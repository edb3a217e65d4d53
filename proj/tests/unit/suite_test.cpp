#include <gtest/gtest.h>

#include <algorithm>

#include "pacing/suite.hpp"

namespace pacing {
namespace {

std::vector<std::vector<std::string>> without_runtime(const SuiteReport& r) {
  auto rows = r.rows;
  for (auto& row : rows) row.pop_back();
  return rows;
}

TEST(Suite, ParsesKindNames) {
  EXPECT_EQ(parse_suite_kind("static"), SuiteKind::static_markets);
  EXPECT_EQ(parse_suite_kind("lower-bound"), SuiteKind::lower_bound);
  for (SuiteKind k : {SuiteKind::online, SuiteKind::concave, SuiteKind::reduction,
                      SuiteKind::monotonicity}) {
    EXPECT_EQ(parse_suite_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_suite_kind("bogus"), StructuralError);
}

TEST(Suite, DeterministicApartFromTiming) {
  SuiteConfig config;
  config.seed = 81;
  config.count = 6;
  const SuiteReport a = run_suite(config, SuiteKind::static_markets);
  config.threads = 2;
  const SuiteReport b = run_suite(config, SuiteKind::static_markets);
  EXPECT_EQ(without_runtime(a), without_runtime(b));
  EXPECT_EQ(a.failures, 0);
  EXPECT_EQ(a.header.back(), "runtime_ms");
}

TEST(Suite, LowerBoundRatios) {
  const SuiteReport r = run_suite(SuiteConfig{}, SuiteKind::lower_bound);
  ASSERT_EQ(r.rows.size(), 4u);
  const auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(
        std::find(r.header.begin(), r.header.end(), name) - r.header.begin());
  };
  for (const auto& row : r.rows) {
    const double n = std::stod(row[col("n")]);
    EXPECT_NEAR(std::stod(row[col("rmfup_ratio")]), n / (2 * n - 1), 1e-7);
    EXPECT_EQ(row[col("status")], "pass");
  }
}

TEST(Suite, CsvHeaderIsOptional) {
  SuiteConfig config;
  config.count = 2;
  const SuiteReport r = run_suite(config, SuiteKind::monotonicity);
  const std::string with = r.csv(true);
  const std::string without = r.csv(false);
  EXPECT_EQ(with.substr(0, 6), "index,");
  EXPECT_EQ(with.size(), without.size() + with.find('\n') + 1);
}

TEST(Suite, EveryKindRunsClean) {
  SuiteConfig config;
  config.seed = 82;
  config.count = 3;
  config.max_buyers = 4;
  config.max_goods = 3;
  for (SuiteKind k : {SuiteKind::online, SuiteKind::concave, SuiteKind::reduction}) {
    const SuiteReport r = run_suite(config, k);
    EXPECT_EQ(r.rows.size(), 3u) << to_string(k);
    EXPECT_EQ(r.failures, 0) << r.csv();
  }
}

}  // namespace
}  // namespace pacing
