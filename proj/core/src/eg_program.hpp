#pragma once

#include <cstdint>
#include <vector>

#include "pacing/interior_point.hpp"
#include "pacing/valuation.hpp"

namespace pacing::detail {

using ValuationGrid = std::vector<std::vector<ConcaveValuation>>;

enum class EgStart { uniform, perturbed };

// Raw optimum of the quasi-linear Eisenberg-Gale primal
//   max sum_i B_i ln u_i - delta_i
//   s.t. u_i <= sum_j v_ij(x_ij) + delta_i,  sum_i x_ij <= 1,  x, delta >= 0
// with u eliminated. Every budget must be positive.
struct EgRaw {
  Matrix x;
  Vector delta;
  Vector u;       // sum_j v_ij(x_ij) + delta_i, evaluated on the true v
  Vector prices;  // supply multipliers
  bool converged = false;
  int iterations = 0;
  double complementarity = 0.0;
  double stationarity = 0.0;
};

EgRaw solve_eg(const Vector& budgets, const ValuationGrid& valuations,
               EgStart start, std::uint64_t seed,
               const InteriorPointOptions& options);

}  // namespace pacing::detail
