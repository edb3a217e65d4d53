#include "pacing/market.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pacing {

MarketInstance::MarketInstance(Vector budgets, Matrix values)
    : budgets_(std::move(budgets)), values_(std::move(values)) {
  if (budgets_.size() < 1 || values_.cols() < 1) {
    throw StructuralError("market needs at least one buyer and one good");
  }
  if (values_.rows() != budgets_.size()) {
    std::ostringstream msg;
    msg << "values has " << values_.rows() << " rows but there are "
        << budgets_.size() << " budgets";
    throw StructuralError(msg.str());
  }
  for (int i = 0; i < budgets_.size(); ++i) {
    if (!std::isfinite(budgets_(i)) || budgets_(i) < 0.0) {
      throw StructuralError("budget of buyer " + std::to_string(i) +
                            " must be finite and nonnegative");
    }
  }
  for (int i = 0; i < values_.rows(); ++i) {
    for (int j = 0; j < values_.cols(); ++j) {
      if (!std::isfinite(values_(i, j)) || values_(i, j) < 0.0) {
        throw StructuralError("value v[" + std::to_string(i) + "][" +
                              std::to_string(j) +
                              "] must be finite and nonnegative");
      }
    }
  }
}

MarketInstance MarketInstance::restrict_buyers(const std::vector<int>& buyers,
                                               const Vector& budgets) const {
  if (static_cast<int>(buyers.size()) != budgets.size()) {
    throw StructuralError("restrict_buyers: budget count mismatch");
  }
  Matrix values(static_cast<int>(buyers.size()), goods());
  for (int k = 0; k < static_cast<int>(buyers.size()); ++k) {
    values.row(k) = values_.row(buyers[k]);
  }
  return MarketInstance(budgets, std::move(values));
}

MarketInstance MarketInstance::with_budgets(Vector budgets) const {
  return MarketInstance(std::move(budgets), values_);
}

Outcome Outcome::zero(int buyers, int goods) {
  return Outcome{Matrix::Zero(buyers, goods), Matrix::Zero(buyers, goods),
                 std::nullopt};
}

std::string to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::nonnegativity:
      return "nonnegativity";
    case ConstraintKind::supply:
      return "supply";
    case ConstraintKind::budget:
      return "budget";
    case ConstraintKind::individual_rationality:
      return "individual_rationality";
    case ConstraintKind::fixed_price:
      return "fixed_price";
  }
  return "unknown";
}

double FeasibilityReport::max_violation() const {
  double worst = 0.0;
  for (const auto& v : violations) worst = std::max(worst, v.magnitude);
  return worst;
}

bool FeasibilityReport::has(ConstraintKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

FeasibilityReport validate(const MarketInstance& instance,
                           const Outcome& outcome, PricingMode mode,
                           double tol) {
  const int n = instance.buyers();
  const int m = instance.goods();
  if (outcome.x.rows() != n || outcome.x.cols() != m ||
      outcome.b.rows() != n || outcome.b.cols() != m) {
    throw StructuralError("outcome dimensions do not match the instance");
  }
  if (outcome.p && outcome.p->size() != m) {
    throw StructuralError("price vector has the wrong length");
  }
  if (mode == PricingMode::fixed && !outcome.p) {
    throw StructuralError("fixed-price validation requires a price vector");
  }

  FeasibilityReport report;
  auto flag = [&](ConstraintKind kind, int i, int j, double excess) {
    if (excess > tol) report.violations.push_back({kind, i, j, excess});
  };

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      flag(ConstraintKind::nonnegativity, i, j, -outcome.x(i, j));
      flag(ConstraintKind::nonnegativity, i, j, -outcome.b(i, j));
      flag(ConstraintKind::individual_rationality, i, j,
           outcome.b(i, j) - instance.value(i, j) * outcome.x(i, j));
      if (mode == PricingMode::fixed) {
        flag(ConstraintKind::fixed_price, i, j,
             std::abs(outcome.b(i, j) - (*outcome.p)(j)*outcome.x(i, j)));
      }
    }
    flag(ConstraintKind::budget, i, -1,
         outcome.b.row(i).sum() - instance.budget(i));
  }
  for (int j = 0; j < m; ++j) {
    flag(ConstraintKind::supply, -1, j, outcome.x.col(j).sum() - 1.0);
  }
  if (mode == PricingMode::fixed) {
    for (int j = 0; j < m; ++j) {
      flag(ConstraintKind::nonnegativity, -1, j, -(*outcome.p)(j));
    }
  }
  return report;
}

double revenue(const Outcome& outcome) { return outcome.b.sum(); }

Vector spend(const Matrix& payments) { return payments.rowwise().sum(); }

Vector received_value(const MarketInstance& instance, const Matrix& x) {
  if (x.rows() != instance.buyers() || x.cols() != instance.goods()) {
    throw StructuralError("allocation dimensions do not match the instance");
  }
  return instance.values().cwiseProduct(x).rowwise().sum();
}

double liquid_welfare(const MarketInstance& instance, const Matrix& x) {
  const Vector value = received_value(instance, x);
  double total = 0.0;
  for (int i = 0; i < instance.buyers(); ++i) {
    total += std::min(value(i), instance.budget(i));
  }
  return total;
}

}  // namespace pacing
