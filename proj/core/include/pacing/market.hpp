#pragma once

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pacing {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Absolute tolerances on unit-scale data.
inline constexpr double kFeasibilityTol = 1e-7;
inline constexpr double kEquilibriumTol = 1e-6;
inline constexpr double kLpTol = 1e-8;

// Malformed input: wrong dimensions, negative data, an instance of the wrong
// shape. Distinct from a well-formed outcome that merely violates constraints.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// n budget-constrained buyers and m divisible goods with linear values
// v_ij (money per unit of good j).
class MarketInstance {
 public:
  MarketInstance(Vector budgets, Matrix values);

  int buyers() const { return static_cast<int>(budgets_.size()); }
  int goods() const { return static_cast<int>(values_.cols()); }

  const Vector& budgets() const { return budgets_; }
  const Matrix& values() const { return values_; }
  double budget(int i) const { return budgets_(i); }
  double value(int i, int j) const { return values_(i, j); }

  // Sub-market over the given buyers (in order) with replacement budgets.
  MarketInstance restrict_buyers(const std::vector<int>& buyers,
                                 const Vector& budgets) const;
  MarketInstance with_budgets(Vector budgets) const;

 private:
  Vector budgets_;
  Matrix values_;
};

// Allocation x (fractions), payments b (money) and, for fixed-price
// outcomes, the per-good unit prices p.
struct Outcome {
  Matrix x;
  Matrix b;
  std::optional<Vector> p;

  static Outcome zero(int buyers, int goods);
};

enum class PricingMode { variable, fixed };

enum class ConstraintKind {
  nonnegativity,
  supply,
  budget,
  individual_rationality,
  fixed_price,
};

std::string to_string(ConstraintKind kind);

struct Violation {
  ConstraintKind kind;
  int buyer = -1;  // -1 when the constraint is per good
  int good = -1;   // -1 when the constraint is per buyer
  double magnitude = 0.0;
};

struct FeasibilityReport {
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  double max_violation() const;
  bool has(ConstraintKind kind) const;
};

// Checks every RMVUP constraint (and b_ij = p_j x_ij in fixed mode).
// Throws StructuralError on dimension mismatch or a missing price vector.
FeasibilityReport validate(const MarketInstance& instance,
                           const Outcome& outcome, PricingMode mode,
                           double tol = kFeasibilityTol);

double revenue(const Outcome& outcome);

// LW(x) = sum_i min(sum_j v_ij x_ij, B_i).
double liquid_welfare(const MarketInstance& instance, const Matrix& x);

// Per-buyer totals.
Vector spend(const Matrix& payments);
Vector received_value(const MarketInstance& instance, const Matrix& x);

}  // namespace pacing
