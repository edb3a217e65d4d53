#include "eg_program.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pacing::detail {

namespace {

enum class TermKind { linear, smooth, epigraph };

struct PairTerm {
  int buyer;
  int good;
  TermKind kind;
  int x_var;
  int w_var = -1;  // epigraph variable for piecewise-linear pairs
  ConcaveValuation valuation;
};

class EgObjective final : public ConcaveObjective {
 public:
  EgObjective(const Vector& budgets, const std::vector<PairTerm>& terms,
              int delta_offset, int num_vars)
      : budgets_(budgets),
        terms_(terms),
        delta_offset_(delta_offset),
        num_vars_(num_vars) {}

  Vector utilities(const Vector& z) const {
    Vector u = z.segment(delta_offset_, budgets_.size());
    for (const auto& t : terms_) u(t.buyer) += term_value(t, z);
    return u;
  }

  bool in_domain(const Vector& z) const override {
    for (const auto& t : terms_) {
      if (t.kind == TermKind::smooth &&
          z(t.x_var) + t.valuation.shift() <= 0.0) {
        return false;
      }
    }
    return (utilities(z).array() > 0.0).all();
  }

  double value(const Vector& z) const override {
    const Vector u = utilities(z);
    double total = 0.0;
    for (int i = 0; i < budgets_.size(); ++i) {
      total += budgets_(i) * std::log(u(i)) - z(delta_offset_ + i);
    }
    return total;
  }

  void derivatives(const Vector& z, Vector& gradient,
                   Matrix& hessian) const override {
    const int n = static_cast<int>(budgets_.size());
    const Vector u = utilities(z);
    // Sparse gradient of u_i: (variable, coefficient) pairs.
    std::vector<std::vector<std::pair<int, double>>> du(n);
    for (int i = 0; i < n; ++i) du[i].emplace_back(delta_offset_ + i, 1.0);
    gradient.setZero(num_vars_);
    hessian.setZero(num_vars_, num_vars_);
    for (const auto& t : terms_) {
      const double weight = budgets_(t.buyer) / u(t.buyer);
      switch (t.kind) {
        case TermKind::linear:
          du[t.buyer].emplace_back(t.x_var, t.valuation.derivative(0.0));
          break;
        case TermKind::smooth: {
          const double x = z(t.x_var);
          du[t.buyer].emplace_back(t.x_var, t.valuation.derivative(x));
          hessian(t.x_var, t.x_var) +=
              weight * t.valuation.second_derivative(x);
          break;
        }
        case TermKind::epigraph:
          du[t.buyer].emplace_back(t.w_var, 1.0);
          break;
      }
    }
    for (int i = 0; i < n; ++i) {
      const double weight = budgets_(i) / u(i);
      const double curvature = budgets_(i) / (u(i) * u(i));
      for (const auto& [a, ga] : du[i]) {
        gradient(a) += weight * ga;
        for (const auto& [c, gc] : du[i]) hessian(a, c) -= curvature * ga * gc;
      }
      gradient(delta_offset_ + i) -= 1.0;
    }
  }

 private:
  static double term_value(const PairTerm& t, const Vector& z) {
    switch (t.kind) {
      case TermKind::linear:
        return t.valuation.derivative(0.0) * z(t.x_var);
      case TermKind::smooth:
        return t.valuation.value(z(t.x_var));
      case TermKind::epigraph:
        return z(t.w_var);
    }
    return 0.0;
  }

  const Vector& budgets_;
  const std::vector<PairTerm>& terms_;
  int delta_offset_;
  int num_vars_;
};

}  // namespace

EgRaw solve_eg(const Vector& budgets, const ValuationGrid& valuations,
               EgStart start, std::uint64_t seed,
               const InteriorPointOptions& options) {
  const int n = static_cast<int>(budgets.size());
  const int m = n > 0 ? static_cast<int>(valuations.front().size()) : 0;
  if (n == 0 || static_cast<int>(valuations.size()) != n) {
    throw StructuralError("EG program: budgets and valuations disagree");
  }
  if ((budgets.array() <= 0.0).any()) {
    throw StructuralError("EG program requires positive budgets");
  }

  std::vector<PairTerm> terms;
  int num_vars = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const ConcaveValuation& v = valuations[i][j];
      if (v.is_zero()) continue;
      TermKind kind = TermKind::smooth;
      if (v.is_linear()) {
        kind = TermKind::linear;
      } else if (v.kind() == ConcaveValuation::Kind::piecewise_linear) {
        kind = TermKind::epigraph;
      }
      terms.push_back({i, j, kind, num_vars++, -1, v});
    }
  }
  const int delta_offset = num_vars;
  num_vars += n;
  for (auto& t : terms) {
    if (t.kind == TermKind::epigraph) t.w_var = num_vars++;
  }

  // Constraint rows: x >= 0, delta >= 0, supply, epigraph pieces.
  std::vector<int> goods_used;
  std::vector<int> supply_row(m, -1);
  int rows = static_cast<int>(terms.size()) + n;
  for (const auto& t : terms) {
    if (supply_row[t.good] < 0) {
      supply_row[t.good] = rows++;
      goods_used.push_back(t.good);
    }
  }
  for (const auto& t : terms) {
    if (t.kind == TermKind::epigraph) {
      rows += static_cast<int>(t.valuation.affine_pieces().size());
    }
  }
  Matrix A = Matrix::Zero(rows, num_vars);
  Vector b = Vector::Zero(rows);
  int row = 0;
  for (const auto& t : terms) A(row++, t.x_var) = -1.0;
  for (int i = 0; i < n; ++i) A(row++, delta_offset + i) = -1.0;
  for (const auto& t : terms) {
    A(supply_row[t.good], t.x_var) = 1.0;
    b(supply_row[t.good]) = 1.0;
  }
  row += static_cast<int>(goods_used.size());
  for (const auto& t : terms) {
    if (t.kind != TermKind::epigraph) continue;
    for (const auto& [slope, intercept] : t.valuation.affine_pieces()) {
      A(row, t.w_var) = 1.0;
      A(row, t.x_var) = -slope;
      b(row) = intercept;
      ++row;
    }
  }

  // Strictly feasible start.
  std::vector<int> per_good(m, 0);
  for (const auto& t : terms) ++per_good[t.good];
  Vector z = Vector::Zero(num_vars);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.25, 1.0);
  if (start == EgStart::uniform) {
    for (const auto& t : terms) z(t.x_var) = 1.0 / (per_good[t.good] + 1);
    for (int i = 0; i < n; ++i) z(delta_offset + i) = budgets(i);
  } else {
    std::vector<double> weight(terms.size());
    std::vector<double> total(m, 0.0);
    for (std::size_t k = 0; k < terms.size(); ++k) {
      weight[k] = unit(rng);
      total[terms[k].good] += weight[k];
    }
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const double share = unit(rng) * 0.9;
      z(terms[k].x_var) = share * weight[k] / total[terms[k].good];
    }
    for (int i = 0; i < n; ++i) {
      z(delta_offset + i) = budgets(i) * (0.2 + 2.0 * unit(rng));
    }
  }
  for (const auto& t : terms) {
    if (t.kind != TermKind::epigraph) continue;
    const double v = t.valuation.value(z(t.x_var));
    z(t.w_var) = v - 1e-3 * (1.0 + v);
  }

  EgObjective objective(budgets, terms, delta_offset, num_vars);
  const InteriorPointResult ipm = maximize_concave(objective, A, b, z, options);

  EgRaw raw;
  raw.converged = ipm.converged;
  raw.iterations = ipm.iterations;
  raw.complementarity = ipm.complementarity;
  raw.stationarity = ipm.stationarity;
  raw.x = Matrix::Zero(n, m);
  for (const auto& t : terms) raw.x(t.buyer, t.good) = std::max(0.0, ipm.z(t.x_var));
  raw.delta = ipm.z.segment(delta_offset, n).cwiseMax(0.0);
  raw.u = raw.delta;
  for (const auto& t : terms) {
    raw.u(t.buyer) += t.valuation.value(raw.x(t.buyer, t.good));
  }
  raw.prices = Vector::Zero(m);
  for (int j = 0; j < m; ++j) {
    if (supply_row[j] >= 0) raw.prices(j) = ipm.multipliers(supply_row[j]);
  }
  return raw;
}

}  // namespace pacing::detail
