#include "pacing/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pacing {

LinearProgram::LinearProgram(int num_variables)
    : objective_(Vector::Zero(num_variables)),
      lower_(Vector::Zero(num_variables)),
      upper_(Vector::Constant(num_variables, kInfinity)) {
  if (num_variables < 1) {
    throw StructuralError("a linear program needs at least one variable");
  }
}

void LinearProgram::set_bounds(int var, double lower, double upper) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper ||
      lower == kInfinity || upper == -kInfinity) {
    throw StructuralError("invalid bounds for variable " + std::to_string(var));
  }
  lower_(var) = lower;
  upper_(var) = upper;
}

int LinearProgram::add_constraint(Vector coefficients, Relation relation,
                                  double bound) {
  if (coefficients.size() != objective_.size()) {
    throw StructuralError("constraint arity does not match the objective");
  }
  if (!std::isfinite(bound)) {
    throw StructuralError("constraint bound must be finite");
  }
  rows_.push_back({std::move(coefficients), relation, bound});
  return static_cast<int>(rows_.size()) - 1;
}

int LinearProgram::add_constraint(
    const SparseRow& terms, Relation relation,
    double bound) {
  Vector row = Vector::Zero(objective_.size());
  for (const auto& [var, coef] : terms) {
    if (var < 0 || var >= row.size()) {
      throw StructuralError("constraint references an unknown variable");
    }
    row(var) += coef;
  }
  return add_constraint(std::move(row), relation, bound);
}

double LinearProgram::max_violation(const Vector& values) const {
  double worst = 0.0;
  for (int k = 0; k < values.size(); ++k) {
    worst = std::max({worst, lower_(k) - values(k), values(k) - upper_(k)});
  }
  for (const auto& row : rows_) {
    const double lhs = row.coefficients.dot(values);
    switch (row.relation) {
      case Relation::less_equal:
        worst = std::max(worst, lhs - row.bound);
        break;
      case Relation::greater_equal:
        worst = std::max(worst, row.bound - lhs);
        break;
      case Relation::equal:
        worst = std::max(worst, std::abs(lhs - row.bound));
        break;
    }
  }
  return worst;
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal:
      return "optimal";
    case LpStatus::infeasible:
      return "infeasible";
    case LpStatus::unbounded:
      return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-10;
constexpr int kMaxIterations = 100000;
constexpr int kDegenerateRunBeforeBland = 50;

// x_k = offset + sign * y[col] - (free ? y[col2] : 0)
struct VariableMap {
  int col = -1;
  int col2 = -1;
  double sign = 1.0;
  double offset = 0.0;
};

struct StandardRow {
  Vector a;
  Relation relation;
  double rhs;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Tableau {
 public:
  Tableau(RowMatrix table, std::vector<int> basis)
      : t_(std::move(table)), basis_(std::move(basis)) {}

  int rows() const { return static_cast<int>(t_.rows()); }
  int cols() const { return static_cast<int>(t_.cols()) - 1; }
  double rhs(int r) const { return t_(r, cols()); }
  double at(int r, int c) const { return t_(r, c); }
  int basic(int r) const { return basis_[r]; }

  void pivot(int r, int c) {
    t_.row(r) /= t_(r, c);
    for (int k = 0; k < rows(); ++k) {
      if (k == r) continue;
      const double factor = t_(k, c);
      if (factor != 0.0) t_.row(k) -= factor * t_.row(r);
    }
    basis_[r] = c;
  }

  void drop_row(int r) {
    const int last = rows() - 1;
    if (r != last) {
      t_.row(r) = t_.row(last);
      basis_[r] = basis_[last];
    }
    t_.conservativeResize(last, Eigen::NoChange);
    basis_.pop_back();
  }

  // Maximize cost . y over columns with allowed[c] == true.
  LpStatus optimize(const Vector& cost, const std::vector<bool>& allowed,
                    int& iterations) {
    const int C = cols();
    Vector reduced = reduced_costs(cost);
    int degenerate_run = 0;
    bool bland = false;
    int since_refresh = 0;
    for (;;) {
      if (iterations >= kMaxIterations) {
        throw std::runtime_error("simplex iteration limit exceeded");
      }
      int enter = -1;
      double best = -kCostTol;
      for (int c = 0; c < C; ++c) {
        if (!allowed[c] || reduced(c) >= -kCostTol) continue;
        if (bland) {
          enter = c;
          break;
        }
        if (reduced(c) < best) {
          best = reduced(c);
          enter = c;
        }
      }
      if (enter < 0) return LpStatus::optimal;

      int leave = -1;
      double best_ratio = kInfinity;
      for (int r = 0; r < rows(); ++r) {
        const double a = t_(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = std::max(0.0, rhs(r)) / a;
        bool take = false;
        if (leave < 0 || ratio < best_ratio - 1e-12) {
          take = true;
        } else if (ratio <= best_ratio + 1e-12) {
          take = bland ? basis_[r] < basis_[leave] : a > t_(leave, enter);
        }
        if (take) {
          leave = r;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
      if (leave < 0) return LpStatus::unbounded;

      degenerate_run = best_ratio < 1e-12 ? degenerate_run + 1 : 0;
      if (degenerate_run > kDegenerateRunBeforeBland) bland = true;

      pivot(leave, enter);
      ++iterations;
      if (++since_refresh >= 50) {
        reduced = reduced_costs(cost);
        since_refresh = 0;
      } else {
        const double factor = reduced(enter);
        reduced -= factor * t_.row(leave).transpose();
      }
    }
  }

  Vector basic_solution() const {
    Vector y = Vector::Zero(cols());
    for (int r = 0; r < rows(); ++r) y(basis_[r]) = rhs(r);
    return y;
  }

 private:
  // Last entry is the objective value of the current basis.
  Vector reduced_costs(const Vector& cost) const {
    Vector d = Vector::Zero(cols() + 1);
    for (int r = 0; r < rows(); ++r) {
      const double cb = cost(basis_[r]);
      if (cb != 0.0) d += cb * t_.row(r).transpose();
    }
    d.head(cols()) -= cost;
    return d;
  }

  RowMatrix t_;
  std::vector<int> basis_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const int nv = lp.num_variables();

  // Shift/split variables so every standard column is y >= 0.
  std::vector<VariableMap> vars(nv);
  int ny = 0;
  std::vector<StandardRow> rows;
  std::vector<std::pair<int, double>> upper_rows;  // (column, bound)
  for (int k = 0; k < nv; ++k) {
    const double lo = lp.lower()(k);
    const double hi = lp.upper()(k);
    VariableMap& map = vars[k];
    if (std::isfinite(lo)) {
      map = {ny++, -1, 1.0, lo};
      if (std::isfinite(hi)) upper_rows.emplace_back(map.col, hi - lo);
    } else if (std::isfinite(hi)) {
      map = {ny++, -1, -1.0, hi};
    } else {
      map.col = ny++;
      map.col2 = ny++;
    }
  }

  auto to_standard = [&](const Vector& coefficients, Relation relation,
                         double bound) {
    StandardRow row{Vector::Zero(ny), relation, bound};
    for (int k = 0; k < nv; ++k) {
      const double a = coefficients(k);
      if (a == 0.0) continue;
      const VariableMap& map = vars[k];
      row.a(map.col) += a * map.sign;
      if (map.col2 >= 0) row.a(map.col2) -= a;
      row.rhs -= a * map.offset;
    }
    return row;
  };

  for (const auto& c : lp.constraints()) {
    rows.push_back(to_standard(c.coefficients, c.relation, c.bound));
  }
  for (const auto& [col, bound] : upper_rows) {
    StandardRow row{Vector::Zero(ny), Relation::less_equal, bound};
    row.a(col) = 1.0;
    rows.push_back(std::move(row));
  }
  for (auto& row : rows) {
    if (row.rhs < 0.0) {
      row.a = -row.a;
      row.rhs = -row.rhs;
      if (row.relation == Relation::less_equal) {
        row.relation = Relation::greater_equal;
      } else if (row.relation == Relation::greater_equal) {
        row.relation = Relation::less_equal;
      }
    }
  }

  const int R = static_cast<int>(rows.size());
  int num_slack = 0;
  int num_art = 0;
  for (const auto& row : rows) {
    if (row.relation != Relation::equal) ++num_slack;
    if (row.relation != Relation::less_equal) ++num_art;
  }
  const int art_begin = ny + num_slack;
  const int C = art_begin + num_art;

  Vector std_cost = Vector::Zero(C);
  for (int k = 0; k < nv; ++k) {
    const double c = lp.objective()(k);
    const VariableMap& map = vars[k];
    std_cost(map.col) += c * map.sign;
    if (map.col2 >= 0) std_cost(map.col2) -= c;
  }

  LpSolution solution;
  if (R == 0) {
    // Only sign constraints: optimum at y = 0 unless some cost is positive.
    for (int c = 0; c < ny; ++c) {
      if (std_cost(c) > kCostTol) {
        solution.status = LpStatus::unbounded;
        return solution;
      }
    }
    solution.status = LpStatus::optimal;
    solution.values = Vector::Zero(nv);
    for (int k = 0; k < nv; ++k) solution.values(k) = vars[k].offset;
    solution.objective = lp.objective().dot(solution.values);
    return solution;
  }

  RowMatrix table = RowMatrix::Zero(R, C + 1);
  std::vector<int> basis(R);
  int slack = ny;
  int art = art_begin;
  double rhs_scale = 1.0;
  for (int r = 0; r < R; ++r) {
    table.row(r).head(ny) = rows[r].a.transpose();
    table(r, C) = rows[r].rhs;
    rhs_scale = std::max(rhs_scale, rows[r].rhs);
    switch (rows[r].relation) {
      case Relation::less_equal:
        table(r, slack) = 1.0;
        basis[r] = slack++;
        break;
      case Relation::greater_equal:
        table(r, slack++) = -1.0;
        table(r, art) = 1.0;
        basis[r] = art++;
        break;
      case Relation::equal:
        table(r, art) = 1.0;
        basis[r] = art++;
        break;
    }
  }

  Tableau tableau(std::move(table), std::move(basis));
  int iterations = 0;

  if (num_art > 0) {
    Vector phase1_cost = Vector::Zero(C);
    phase1_cost.tail(num_art).setConstant(-1.0);
    std::vector<bool> allowed(C, true);
    tableau.optimize(phase1_cost, allowed, iterations);
    double infeasibility = 0.0;
    for (int r = 0; r < tableau.rows(); ++r) {
      if (tableau.basic(r) >= art_begin) infeasibility += tableau.rhs(r);
    }
    if (infeasibility > 1e-9 * rhs_scale) {
      solution.status = LpStatus::infeasible;
      solution.iterations = iterations;
      return solution;
    }
    // Pivot zero-level artificials out of the basis; drop redundant rows.
    for (int r = tableau.rows() - 1; r >= 0; --r) {
      if (tableau.basic(r) < art_begin) continue;
      int enter = -1;
      double best = kPivotTol;
      for (int c = 0; c < art_begin; ++c) {
        if (std::abs(tableau.at(r, c)) > best) {
          best = std::abs(tableau.at(r, c));
          enter = c;
        }
      }
      if (enter >= 0) {
        tableau.pivot(r, enter);
      } else {
        tableau.drop_row(r);
      }
    }
  }

  std::vector<bool> allowed(C, false);
  std::fill(allowed.begin(), allowed.begin() + art_begin, true);
  const LpStatus status = tableau.optimize(std_cost, allowed, iterations);
  solution.iterations = iterations;
  solution.status = status;
  if (status != LpStatus::optimal) return solution;

  const Vector y = tableau.basic_solution();
  solution.values.resize(nv);
  for (int k = 0; k < nv; ++k) {
    const VariableMap& map = vars[k];
    double value = map.offset + map.sign * y(map.col);
    if (map.col2 >= 0) value -= y(map.col2);
    solution.values(k) = value;
  }
  solution.objective = lp.objective().dot(solution.values);
  return solution;
}

}  // namespace pacing
