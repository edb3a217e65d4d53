#include "pacing/concave.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eg_program.hpp"
#include "pacing/io.hpp"
#include "pacing/lp.hpp"

namespace pacing {

namespace {

// Slope of v as x grows without bound (0 for shifted powers with a < 1).
double tail_slope(const ConcaveValuation& v) {
  switch (v.kind()) {
    case ConcaveValuation::Kind::linear:
      return v.scale();
    case ConcaveValuation::Kind::shifted_power:
      return v.exponent() == 1.0 ? v.scale() : 0.0;
    case ConcaveValuation::Kind::piecewise_linear:
      return v.affine_pieces().back().first;
  }
  return 0.0;
}

// Conjugate with round-off forgiveness: a price that undercuts the paced
// tail slope by a relative 1e-9 is treated as equal to it.
double conjugate_term(const ConcaveValuation& v, double alpha, double price) {
  const double tail = alpha * tail_slope(v);
  if (tail > price && tail <= price + 1e-9 * (1.0 + price)) price = tail;
  return v.conjugate(alpha, price);
}

// Affine majorants (outer) or secant minorants (inner) of v on [0, 1].
std::vector<std::pair<double, double>> hypograph_pieces(
    const ConcaveValuation& v, int segments, bool outer) {
  if (v.is_linear()) return {{v.derivative_at_zero(), 0.0}};
  if (v.kind() == ConcaveValuation::Kind::piecewise_linear) {
    return v.affine_pieces();
  }
  std::vector<std::pair<double, double>> pieces;
  for (int k = 0; k <= segments; ++k) {
    const double x0 = static_cast<double>(k) / segments;
    if (outer) {
      const double slope = v.derivative(x0);
      if (!std::isfinite(slope)) continue;
      pieces.emplace_back(slope, v.value(x0) - slope * x0);
    } else if (k < segments) {
      const double x1 = static_cast<double>(k + 1) / segments;
      const double slope = (v.value(x1) - v.value(x0)) * segments;
      pieces.emplace_back(slope, v.value(x0) - slope * x0);
    }
  }
  return pieces;
}

// Shared LP for the revenue and welfare programs: variables x_ij and w_ij
// (value credited on pair ij) with w_ij under the hypograph pieces.
// `welfare` adds t_i <= B_i, t_i <= sum_j w_ij and maximizes sum t;
// otherwise w_ij is the payment, capped per buyer by B_i.
// Pieces enter lazily: the LP is re-solved with every piece the current
// optimum violates until none is, which gives the optimum over all pieces.
ConcaveBound solve_bracket(const ConcaveMarket& market, int segments,
                           bool welfare) {
  if (segments < 1) throw StructuralError("need at least one segment");
  const int n = market.buyers();
  const int m = market.goods();
  const int nm = n * m;
  auto x = [m](int i, int j) { return i * m + j; };
  auto w = [m, nm](int i, int j) { return nm + i * m + j; };
  ConcaveBound bound;
  for (bool outer : {false, true}) {
    std::vector<std::vector<std::pair<double, double>>> pieces(nm);
    std::vector<std::vector<bool>> used(nm);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        const ConcaveValuation& v = market.valuation(i, j);
        if (v.is_zero()) continue;
        auto& all = pieces[x(i, j)];
        all = hypograph_pieces(v, segments, outer);
        used[x(i, j)].assign(all.size(), false);
        const std::size_t stride = std::max<std::size_t>(1, all.size() / 8);
        for (std::size_t k = 0; k < all.size(); k += stride) used[x(i, j)][k] = true;
        used[x(i, j)].back() = true;
      }
    }

    LpSolution sol;
    for (bool added = true; added;) {
      LinearProgram lp(2 * nm + (welfare ? n : 0));
      for (int j = 0; j < m; ++j) {
        SparseRow row;
        for (int i = 0; i < n; ++i) row.emplace_back(x(i, j), 1.0);
        lp.add_constraint(row, Relation::less_equal, 1.0);
      }
      for (int i = 0; i < n; ++i) {
        SparseRow row;
        for (int j = 0; j < m; ++j) row.emplace_back(w(i, j), 1.0);
        if (welfare) {
          const int t = 2 * nm + i;
          lp.set_objective(t, 1.0);
          lp.set_bounds(t, 0.0, market.budget(i));
          for (auto& entry : row) entry.second = -1.0;
          row.emplace_back(t, 1.0);
          lp.add_constraint(row, Relation::less_equal, 0.0);
        } else {
          for (const auto& entry : row) lp.set_objective(entry.first, 1.0);
          lp.add_constraint(row, Relation::less_equal, market.budget(i));
        }
        for (int j = 0; j < m; ++j) {
          if (pieces[x(i, j)].empty()) {
            lp.set_bounds(w(i, j), 0.0, 0.0);
            continue;
          }
          for (std::size_t k = 0; k < pieces[x(i, j)].size(); ++k) {
            if (!used[x(i, j)][k]) continue;
            const auto [slope, intercept] = pieces[x(i, j)][k];
            lp.add_constraint(SparseRow{{w(i, j), 1.0}, {x(i, j), -slope}},
                              Relation::less_equal, intercept);
          }
        }
      }
      sol = solve_lp(lp);
      if (sol.status != LpStatus::optimal) {
        throw std::logic_error("concave bracket LP reported " + to_string(sol.status));
      }
      added = false;
      for (int pair = 0; pair < nm; ++pair) {
        const double xv = sol.values(pair);
        const double wv = sol.values(nm + pair);
        std::size_t worst = pieces[pair].size();
        double worst_excess = 1e-12 * (1.0 + std::abs(wv));
        for (std::size_t k = 0; k < pieces[pair].size(); ++k) {
          const auto [slope, intercept] = pieces[pair][k];
          const double excess = wv - (intercept + slope * xv);
          if (!used[pair][k] && excess > worst_excess) {
            worst = k;
            worst_excess = excess;
          }
        }
        if (worst < pieces[pair].size()) {
          used[pair][worst] = true;
          added = true;
        }
      }
    }
    (outer ? bound.outer : bound.inner) = sol.objective;
    if (!outer) {
      bound.x = Matrix::Zero(n, m);
      bound.b = Matrix::Zero(n, m);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
          bound.x(i, j) = std::max(0.0, sol.values(x(i, j)));
          bound.b(i, j) = std::max(0.0, sol.values(w(i, j)));
        }
      }
    }
  }
  return bound;
}

// argmax over y in [0, 1] of v(y) - price * y.
double best_quantity(const ConcaveValuation& v, double price) {
  if (v.is_zero()) return 0.0;
  switch (v.kind()) {
    case ConcaveValuation::Kind::linear:
      return v.scale() > price ? 1.0 : 0.0;
    case ConcaveValuation::Kind::shifted_power: {
      if (v.exponent() == 1.0) return v.scale() > price ? 1.0 : 0.0;
      if (price <= 0.0) return 1.0;
      const double base = price / (v.scale() * v.exponent());
      const double y = std::pow(base, 1.0 / (v.exponent() - 1.0)) - v.shift();
      return std::clamp(y, 0.0, 1.0);
    }
    case ConcaveValuation::Kind::piecewise_linear: {
      double best_y = 0.0;
      double best = 0.0;
      std::vector<double> candidates{1.0};
      for (const auto& point : v.points()) {
        if (point.first < 1.0) candidates.push_back(point.first);
      }
      for (double y : candidates) {
        const double gain = v.value(y) - price * y;
        if (gain > best) {
          best = gain;
          best_y = y;
        }
      }
      return best_y;
    }
  }
  return 0.0;
}

}  // namespace

ConcaveMarket::ConcaveMarket(Vector budgets,
                             std::vector<std::vector<ConcaveValuation>> valuations)
    : budgets_(std::move(budgets)), valuations_(std::move(valuations)) {
  if (budgets_.size() < 1 ||
      static_cast<int>(valuations_.size()) != budgets_.size()) {
    throw StructuralError("concave market needs one valuation row per buyer");
  }
  const std::size_t m = valuations_.front().size();
  if (m < 1) throw StructuralError("concave market needs at least one good");
  for (const auto& row : valuations_) {
    if (row.size() != m) throw StructuralError("valuation rows differ in length");
  }
  if (!budgets_.allFinite() || (budgets_.array() < 0.0).any()) {
    throw StructuralError("budgets must be finite and nonnegative");
  }
}

ConcaveMarket ConcaveMarket::from_linear(const MarketInstance& instance) {
  std::vector<std::vector<ConcaveValuation>> grid(
      instance.buyers(), std::vector<ConcaveValuation>(instance.goods()));
  for (int i = 0; i < instance.buyers(); ++i) {
    for (int j = 0; j < instance.goods(); ++j) {
      grid[i][j] = ConcaveValuation::linear(instance.value(i, j));
    }
  }
  return ConcaveMarket(instance.budgets(), std::move(grid));
}

namespace {
constexpr double kKinkSnap = 1e-8;
}  // namespace

EgSolution solve_concave_eg(const ConcaveMarket& market,
                            const ConcaveOptions& options) {
  const int n = market.buyers();
  const int m = market.goods();
  EgSolution sol;
  sol.x = Matrix::Zero(n, m);
  sol.u = Vector::Zero(n);
  sol.delta = Vector::Zero(n);
  sol.alpha = Vector::Zero(n);
  sol.p = Vector::Zero(m);

  std::vector<int> active;
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    if (market.budget(i) <= 0.0) continue;
    active.push_back(i);
    scale = std::max(scale, market.budget(i));
    for (int j = 0; j < m; ++j) scale = std::max(scale, market.valuation(i, j).value(1.0));
  }
  if (!active.empty()) {
    const int k = static_cast<int>(active.size());
    Vector budgets(k);
    detail::ValuationGrid grid(k, std::vector<ConcaveValuation>(m));
    for (int a = 0; a < k; ++a) {
      budgets(a) = market.budget(active[a]) / scale;
      for (int j = 0; j < m; ++j) {
        grid[a][j] = market.valuation(active[a], j).scaled(1.0 / scale);
      }
    }
    InteriorPointOptions ipm;
    ipm.max_iterations = options.max_iterations;
    const detail::EgRaw raw = detail::solve_eg(
        budgets, grid,
        options.start == FppeStart::uniform ? detail::EgStart::uniform
                                            : detail::EgStart::perturbed,
        options.seed, ipm);
    sol.iterations = raw.iterations;
    for (int a = 0; a < k; ++a) {
      const int i = active[a];
      sol.x.row(i) = raw.x.row(a);
      sol.delta(i) = raw.delta(a) * scale;
      sol.u(i) = sol.delta(i);
      for (int j = 0; j < m; ++j) {
        const ConcaveValuation& v = market.valuation(i, j);
        double& x = sol.x(i, j);
        if (x < 1e-12) x = 0.0;
        for (const auto& point : v.points()) {
          if (std::abs(x - point.first) <= kKinkSnap) x = point.first;
        }
        sol.u(i) += v.value(x);
      }
      sol.alpha(i) = std::min(1.0, market.budget(i) / sol.u(i));
    }
    sol.p = raw.prices.cwiseMax(0.0) * scale;
  }
  sol.payments = sol.x * sol.p.asDiagonal();
  sol.kkt = kkt_residuals(market, sol, options.tol);
  sol.gap = eg_duality_gap(market, sol);
  const double worst = *std::max_element(sol.kkt.begin(), sol.kkt.end());
  if (worst > options.tol || !(std::abs(sol.gap) <= options.tol)) {
    std::ostringstream msg;
    msg << "concave EG did not converge to tolerance " << options.tol
        << ": max KKT residual " << worst << ", gap " << sol.gap;
    throw ConvergenceError(msg.str(), {sol.kkt.begin(), sol.kkt.end()}, sol.gap);
  }
  return sol;
}

KktResiduals kkt_residuals(const ConcaveMarket& market, const EgSolution& c,
                           double tol) {
  const int n = market.buyers();
  const int m = market.goods();
  if (c.x.rows() != n || c.x.cols() != m || c.p.size() != m ||
      c.alpha.size() != n || c.u.size() != n || c.delta.size() != n) {
    throw StructuralError("kkt_residuals: candidate dimensions mismatch");
  }
  KktResiduals r{};
  for (int i = 0; i < n; ++i) {
    const double budget = market.budget(i);
    if (budget > 0.0) {
      r[0] = std::max(r[0], c.u(i) > 0.0 ? std::abs(budget / c.u(i) - c.alpha(i))
                                         : kInfinity);
    }
    double value = 0.0;
    for (int j = 0; j < m; ++j) {
      const ConcaveValuation& v = market.valuation(i, j);
      const double x = c.x(i, j);
      value += v.value(x);
      const Subgradient g = v.subgradient(x);
      const double lo = c.alpha(i) * g.lower;
      const double hi = c.alpha(i) * g.upper;
      double miss = std::max(0.0, lo - c.p(j));
      if (x > tol) miss = std::max({miss, c.p(j) - hi, lo - c.p(j)});
      if (std::isnan(miss)) miss = kInfinity;
      r[1] = std::max(r[1], miss);
    }
    r[2] = std::max(r[2], std::abs(c.alpha(i) * (c.u(i) - value - c.delta(i))));
    r[4] = std::max(r[4], std::abs(c.delta(i) * (1.0 - c.alpha(i))));
  }
  for (int j = 0; j < m; ++j) {
    r[3] = std::max(r[3], std::abs(c.p(j) * (1.0 - c.x.col(j).sum())));
  }
  return r;
}

double eg_duality_gap(const ConcaveMarket& market, const EgSolution& c) {
  const int n = market.buyers();
  const int m = market.goods();
  double primal = 0.0;
  double dual = c.p.sum();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      dual += conjugate_term(market.valuation(i, j), c.alpha(i), c.p(j));
    }
    const double budget = market.budget(i);
    if (budget <= 0.0) continue;
    double value = 0.0;
    for (int j = 0; j < m; ++j) value += market.valuation(i, j).value(c.x(i, j));
    const double u = value + c.delta(i);
    primal += (u > 0.0 ? budget * std::log(u) : -kInfinity) - c.delta(i);
    dual += c.alpha(i) > 0.0 ? budget * std::log(budget / c.alpha(i)) - budget
                             : kInfinity;
  }
  return dual - primal;
}

double rho_general(const ConcaveMarket& market) {
  double rho = 1.0;
  for (const auto& row : market.valuations()) {
    for (const auto& v : row) {
      if (v.is_zero()) continue;
      const double d1 = v.derivative_at_one();
      if (!(d1 > 0.0)) {
        throw StructuralError("rho needs v'(1) > 0 on every valued pair: " +
                              v.describe());
      }
      const double d0 = v.derivative_at_zero();
      if (!std::isfinite(d0)) return kInfinity;
      rho = std::max(rho, d0 / d1);
    }
  }
  return rho;
}

double rho_log(const ConcaveMarket& market) {
  for (const auto& row : market.valuations()) {
    for (const auto& v : row) {
      if (!v.is_zero() && !v.x_derivative_nondecreasing()) {
        throw RhoRefused("x v'(x) is not nondecreasing for " + v.describe() +
                         "; use rho_general");
      }
    }
  }
  return std::log1p(rho_general(market));
}

ConcaveBound rmvup_concave(const ConcaveMarket& market, int segments) {
  return solve_bracket(market, segments, false);
}

ConcaveBound max_liquid_welfare_concave(const ConcaveMarket& market,
                                        int segments) {
  return solve_bracket(market, segments, true);
}

double liquid_welfare(const ConcaveMarket& market, const Matrix& x) {
  double total = 0.0;
  for (int i = 0; i < market.buyers(); ++i) {
    double value = 0.0;
    for (int j = 0; j < market.goods(); ++j) value += market.valuation(i, j).value(x(i, j));
    total += std::min(value, market.budget(i));
  }
  return total;
}

double utility_gap(const ConcaveMarket& market, const Matrix& x,
                   const Vector& p, int buyer) {
  const int m = market.goods();
  auto surplus = [&](const Vector& y) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += market.valuation(buyer, j).value(y(j)) - p(j) * y(j);
    return s;
  };
  // Lagrangian relaxation of the budget: bisect the multiplier lambda.
  auto bundle = [&](double lambda) {
    Vector y(m);
    for (int j = 0; j < m; ++j) {
      y(j) = best_quantity(market.valuation(buyer, j), (1.0 + lambda) * p(j));
    }
    return y;
  };
  const double budget = market.budget(buyer);
  Vector y = bundle(0.0);
  if (p.dot(y) > budget) {
    double lo = 0.0;
    double hi = 1.0;
    while (p.dot(bundle(hi)) > budget && hi < 1e12) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (p.dot(bundle(mid)) > budget ? lo : hi) = mid;
    }
    y = bundle(hi);
    // A linear piece can jump over the budget line; fill it fractionally.
    const Vector y_lo = bundle(lo);
    const double spend_hi = p.dot(y);
    const double spend_lo = p.dot(y_lo);
    if (spend_lo > spend_hi + 1e-15) {
      const double theta = std::clamp((budget - spend_hi) / (spend_lo - spend_hi), 0.0, 1.0);
      y = y + theta * (y_lo - y);
    }
  }
  const Vector current = x.row(buyer).transpose();
  return std::max(0.0, surplus(y) - surplus(current));
}

ConcavePropertyReport concave_properties(const ConcaveMarket& market,
                                         const EgSolution& s, double rho,
                                         double tol) {
  const int n = market.buyers();
  const int m = market.goods();
  ConcavePropertyReport report;
  for (int i = 0; i < n; ++i) {
    double spent = 0.0;
    for (int j = 0; j < m; ++j) {
      const double pay = s.p(j) * s.x(i, j);
      spent += pay;
      report.individual_rationality =
          std::max(report.individual_rationality,
                   pay - market.valuation(i, j).value(s.x(i, j)));
    }
    report.budget = std::max(report.budget, spent - market.budget(i));
    const bool maximizing = utility_gap(market, s.x, s.p, i) <= tol;
    const bool spends = spent >= market.budget(i) / rho - tol;
    if (!maximizing && !spends) ++report.unsatisfied_buyers;
  }
  for (int j = 0; j < m; ++j) {
    if (s.p(j) > tol) {
      report.full_sale = std::max(report.full_sale, std::abs(1.0 - s.x.col(j).sum()));
    }
  }
  return report;
}

ConcaveCertificate concave_revenue_certificate(const ConcaveMarket& market,
                                               const ConcaveOptions& options) {
  ConcaveCertificate cert;
  cert.rho = rho_general(market);
  if (!std::isfinite(cert.rho)) {
    throw StructuralError("revenue certificate needs a finite rho");
  }
  try {
    cert.rho_log = rho_log(market);
  } catch (const RhoRefused&) {
  }
  cert.solution = solve_concave_eg(market, options);
  const EgSolution& sol = cert.solution;
  cert.eg_revenue = sol.payments.sum();
  const ConcaveBound rmvup = rmvup_concave(market);
  cert.rmvup_inner = rmvup.inner;
  cert.rmvup_outer = rmvup.outer;
  cert.bound = rmvup.outer / (cert.rho * (cert.rho + 1.0));
  cert.bound_ok = cert.eg_revenue >= cert.bound - 1e-6;
  cert.liquid_welfare = liquid_welfare(market, sol.x);
  cert.max_liquid_welfare = max_liquid_welfare_concave(market).outer;
  cert.lw_ratio = cert.max_liquid_welfare > 0.0
                      ? cert.liquid_welfare / cert.max_liquid_welfare
                      : 1.0;
  if (!cert.bound_ok) {
    throw CertificateError("concave revenue bound fails on market " +
                           dump_concave_market(market));
  }
  return cert;
}

}  // namespace pacing
