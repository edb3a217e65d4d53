#pragma once

#include "pacing/lp.hpp"
#include "pacing/market.hpp"

namespace pacing {

struct RmvupResult {
  Outcome outcome;  // p is left empty: unit prices are buyer-specific
  double revenue = 0.0;
};

// Revenue maximization with variable unit prices as a literal LP over
// x_ij, b_ij: supply, budget and b_ij <= v_ij x_ij rows plus x, b >= 0.
// Column k < nm is x_{k/m, k%m}; column nm + k is the matching b.
LinearProgram build_rmvup_lp(const MarketInstance& instance);
RmvupResult solve_rmvup(const MarketInstance& instance);

struct WelfareResult {
  Matrix x;
  double liquid_welfare = 0.0;
};

// Allocation maximizing sum_i min(sum_j v_ij x_ij, B_i), through auxiliary
// variables t_i <= B_i, t_i <= sum_j v_ij x_ij.
WelfareResult max_liquid_welfare(const MarketInstance& instance);

}  // namespace pacing
