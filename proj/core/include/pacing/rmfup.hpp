#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pacing/market.hpp"

namespace pacing {

struct FixedPriceResult {
  Vector p;
  Outcome outcome;  // carries p
  double revenue = 0.0;
};

// Revenue-optimal allocation at fixed unit prices: buyers only receive goods
// with v_ij >= p_j and pay p_j per unit within their budgets.
Outcome allocate_given_prices(const MarketInstance& instance, const Vector& p);

// Exact optimum for one good over the candidate prices
// {v_i} and {sum of budgets of buyers valuing at least v_i}.
FixedPriceResult solve_rmfup_single_good(const MarketInstance& instance);

inline constexpr std::size_t kEnumerationCap = 1'000'000;

class EnumerationCapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Best price vector in the cross product of per-good candidate sets.
// Throws EnumerationCapExceeded beyond `cap` combinations.
FixedPriceResult solve_rmfup_enumerate(
    const MarketInstance& instance,
    const std::vector<std::vector<double>>& candidates,
    std::size_t cap = kEnumerationCap, int threads = 1);

// Lower bound on the fixed-price optimum: per-good valuation levels refined
// by coordinate descent, then a local search on a grid of step `delta`
// around the incumbent.
FixedPriceResult solve_rmfup_heuristic(const MarketInstance& instance,
                                       double delta = 0.05);

}  // namespace pacing
