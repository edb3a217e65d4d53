#pragma once

#include <cstdint>
#include <random>

#include "pacing/concave.hpp"
#include "pacing/market.hpp"
#include "pacing/online.hpp"
#include "pacing/reduction.hpp"

namespace pacing {

struct SuiteConfig {
  std::uint64_t seed = 0;
  int count = 200;
  int min_buyers = 1;
  int max_buyers = 6;
  int min_goods = 1;
  int max_goods = 6;
  int min_rounds = 1;
  int max_rounds = 4;
  double sparsity = 0.3;  // probability that a value is zero
  double min_value = 0.0;
  double max_value = 1.0;
  double min_budget = 0.1;
  double max_budget = 1.0;
  double tol = kEquilibriumTol;
  int threads = 1;
};

// Single good; budgets (n, 1, ..., 1) and values n * budget.
MarketInstance gen_lower_bound_family(int n);

AdversarialArrivals gen_adversarial_online();

enum class ConcaveKind { shifted_power, piecewise_linear, mixed };

// Draws from the configured distributions. Stream k of a seed is independent
// of how many draws other streams made.
class InstanceGenerator {
 public:
  InstanceGenerator(const SuiteConfig& config, std::uint64_t stream = 0);

  MarketInstance static_instance();
  OnlineInstance online_instance();
  ConcaveMarket concave_market(ConcaveKind kind);
  // Every element in exactly two triplets; throws StructuralError for odd m.
  ThreeDTwoMatching three_d_two_matching(int triplets);
  // Random prices in [0, 1.2], revenue-optimal allocation, then each
  // buyer's purchases scaled down by a random factor.
  Outcome random_priced_solution(const MarketInstance& market);
  Vector budget_increase(int buyers);

  std::mt19937_64& engine() { return rng_; }

 private:
  int uniform_int(int lo, int hi);
  double uniform(double lo, double hi);
  double sparse_value();

  SuiteConfig config_;
  std::mt19937_64 rng_;
};

}  // namespace pacing
