#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pacing/market.hpp"

namespace pacing {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { less_equal, equal, greater_equal };

// (variable, coefficient) pairs.
using SparseRow = std::vector<std::pair<int, double>>;

struct LinearConstraint {
  Vector coefficients;
  Relation relation = Relation::less_equal;
  double bound = 0.0;
};

// maximize objective . x  subject to rows and lower <= x <= upper.
// Bounds may be +-kInfinity.
class LinearProgram {
 public:
  explicit LinearProgram(int num_variables);

  int num_variables() const { return static_cast<int>(objective_.size()); }
  int num_constraints() const { return static_cast<int>(rows_.size()); }

  void set_objective(int var, double coefficient) { objective_(var) = coefficient; }
  void set_bounds(int var, double lower, double upper);

  int add_constraint(Vector coefficients, Relation relation, double bound);
  int add_constraint(const SparseRow& terms,
                     Relation relation, double bound);

  const Vector& objective() const { return objective_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const std::vector<LinearConstraint>& constraints() const { return rows_; }

  // Largest violation of any row or bound at `values`.
  double max_violation(const Vector& values) const;

 private:
  Vector objective_;
  Vector lower_;
  Vector upper_;
  std::vector<LinearConstraint> rows_;
};

enum class LpStatus { optimal, infeasible, unbounded };

std::string to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Vector values;
  double objective = 0.0;
  int iterations = 0;
};

// Dense two-phase primal simplex (Dantzig pricing, Bland's rule after a run
// of degenerate pivots). Sized for desk-scale programs.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace pacing
