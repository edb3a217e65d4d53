#include "pacing/rmvup.hpp"

#include <algorithm>
#include <stdexcept>

namespace pacing {

LinearProgram build_rmvup_lp(const MarketInstance& instance) {
  const int n = instance.buyers();
  const int m = instance.goods();
  const int nm = n * m;
  LinearProgram lp(2 * nm);
  auto x = [m](int i, int j) { return i * m + j; };
  auto b = [m, nm](int i, int j) { return nm + i * m + j; };

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) lp.set_objective(b(i, j), 1.0);
  }
  for (int j = 0; j < m; ++j) {
    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < n; ++i) row.emplace_back(x(i, j), 1.0);
    lp.add_constraint(row, Relation::less_equal, 1.0);
  }
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < m; ++j) row.emplace_back(b(i, j), 1.0);
    lp.add_constraint(row, Relation::less_equal, instance.budget(i));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      lp.add_constraint(SparseRow{{b(i, j), 1.0}, {x(i, j), -instance.value(i, j)}},
                        Relation::less_equal, 0.0);
    }
  }
  return lp;
}

RmvupResult solve_rmvup(const MarketInstance& instance) {
  const int n = instance.buyers();
  const int m = instance.goods();
  const LpSolution sol = solve_lp(build_rmvup_lp(instance));
  if (sol.status != LpStatus::optimal) {
    throw std::logic_error("RMVUP LP reported " + to_string(sol.status));
  }
  RmvupResult result{Outcome::zero(n, m), 0.0};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      result.outcome.x(i, j) = std::max(0.0, sol.values(i * m + j));
      result.outcome.b(i, j) = std::max(0.0, sol.values(n * m + i * m + j));
    }
  }
  result.revenue = revenue(result.outcome);
  return result;
}

WelfareResult max_liquid_welfare(const MarketInstance& instance) {
  const int n = instance.buyers();
  const int m = instance.goods();
  const int nm = n * m;
  LinearProgram lp(nm + n);
  for (int i = 0; i < n; ++i) {
    lp.set_objective(nm + i, 1.0);
    lp.set_bounds(nm + i, 0.0, instance.budget(i));
    std::vector<std::pair<int, double>> row{{nm + i, 1.0}};
    for (int j = 0; j < m; ++j) row.emplace_back(i * m + j, -instance.value(i, j));
    lp.add_constraint(row, Relation::less_equal, 0.0);
  }
  for (int j = 0; j < m; ++j) {
    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < n; ++i) row.emplace_back(i * m + j, 1.0);
    lp.add_constraint(row, Relation::less_equal, 1.0);
  }
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal) {
    throw std::logic_error("liquid welfare LP reported " + to_string(sol.status));
  }
  WelfareResult result{Matrix::Zero(n, m), 0.0};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) result.x(i, j) = std::max(0.0, sol.values(i * m + j));
  }
  result.liquid_welfare = liquid_welfare(instance, result.x);
  return result;
}

}  // namespace pacing
