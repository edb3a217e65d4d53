#include "pacing/fppe.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include "eg_program.hpp"
#include "pacing/io.hpp"
#include "pacing/lp.hpp"
#include "pacing/rmvup.hpp"

namespace pacing {

double max_residual(const FppeResiduals& residuals) {
  return *std::max_element(residuals.begin(), residuals.end());
}

namespace {

// Budgets this far below the market scale are round-off left over from
// earlier computations and behave as zero.
bool dust_budget(const MarketInstance& instance, int i) {
  const double scale =
      std::max(instance.budgets().maxCoeff(), instance.values().maxCoeff());
  return instance.budget(i) <= 1e-14 * scale;
}

// Rebuilds an exact equilibrium on the support of an approximate one: bids
// within a relative `eps` of the price count as tight and multipliers
// within `eps` of one as unpaced. Tight bids fix prices linearly in the
// paced multipliers; a group of paced buyers with no unpaced anchor
// spends exactly its budgets on its goods. The allocation then solves an
// LP at those prices.
std::optional<FppeOutcome> polish(const MarketInstance& instance,
                                  const FppeOutcome& approx, double eps) {
  const int n = instance.buyers();
  const int m = instance.goods();
  const Matrix& v = instance.values();

  std::vector<int> alpha_var(n, -1);
  std::vector<int> price_var(m, -1);
  int vars = 0;
  for (int i = 0; i < n; ++i) {
    if (instance.budget(i) > 0.0 && approx.alpha(i) > 0.0 &&
        approx.alpha(i) < 1.0 - eps) {
      alpha_var[i] = vars++;
    }
  }
  for (int j = 0; j < m; ++j) {
    if (approx.p(j) > 0.0) price_var[j] = vars++;
  }
  std::vector<std::pair<int, int>> tight;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (price_var[j] >= 0 && v(i, j) > 0.0 &&
          approx.alpha(i) * v(i, j) >= approx.p(j) * (1.0 - eps)) {
        tight.emplace_back(i, j);
      }
    }
  }

  // Union-find over paced buyers and priced goods joined by tight bids.
  std::vector<int> parent(vars);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::vector<bool> anchored(vars, false);
  for (const auto& [i, j] : tight) {
    if (alpha_var[i] >= 0) {
      parent[find(alpha_var[i])] = find(price_var[j]);
    } else {
      anchored[price_var[j]] = true;
    }
  }
  for (int a = 0; a < vars; ++a) {
    if (anchored[a]) anchored[find(a)] = true;
  }
  std::vector<int> group_row(vars, -1);
  int rows = static_cast<int>(tight.size());
  for (int a = 0; a < vars; ++a) {
    const int root = find(a);
    if (!anchored[root] && group_row[root] < 0) group_row[root] = rows++;
  }

  Matrix E = Matrix::Zero(rows, vars);
  Vector rhs = Vector::Zero(rows);
  for (std::size_t k = 0; k < tight.size(); ++k) {
    const auto [i, j] = tight[k];
    E(k, price_var[j]) = 1.0;
    if (alpha_var[i] >= 0) {
      E(k, alpha_var[i]) = -v(i, j);
    } else {
      rhs(k) = approx.alpha(i) >= 1.0 - eps ? v(i, j) : 0.0;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (alpha_var[i] < 0) continue;
    const int r = group_row[find(alpha_var[i])];
    if (r >= 0) rhs(r) += instance.budget(i);
  }
  for (int j = 0; j < m; ++j) {
    if (price_var[j] < 0) continue;
    const int r = group_row[find(price_var[j])];
    if (r >= 0) E(r, price_var[j]) = 1.0;
  }
  const Vector sol = vars > 0 && rows > 0 ? Vector(E.colPivHouseholderQr().solve(rhs))
                                         : Vector(Vector::Zero(vars));
  if (!sol.allFinite()) return std::nullopt;

  FppeOutcome out;
  out.iterations = approx.iterations;
  out.alpha = approx.alpha;
  for (int i = 0; i < n; ++i) {
    if (alpha_var[i] >= 0) {
      out.alpha(i) = sol(alpha_var[i]);
    } else if (approx.alpha(i) >= 1.0 - eps) {
      out.alpha(i) = 1.0;
    }
  }
  out.p = Vector::Zero(m);
  for (int j = 0; j < m; ++j) {
    if (price_var[j] >= 0) out.p(j) = sol(price_var[j]);
  }

  if (tight.empty()) return std::nullopt;
  LinearProgram lp(static_cast<int>(tight.size()));
  std::vector<SparseRow> sold(m), spent(n);
  for (std::size_t k = 0; k < tight.size(); ++k) {
    const auto [i, j] = tight[k];
    const int var = static_cast<int>(k);
    lp.set_bounds(var, 0.0, 1.0);
    lp.set_objective(var, out.p(j));
    sold[j].emplace_back(var, 1.0);
    spent[i].emplace_back(var, out.p(j));
  }
  for (int j = 0; j < m; ++j) {
    if (!sold[j].empty()) lp.add_constraint(sold[j], Relation::equal, 1.0);
  }
  for (int i = 0; i < n; ++i) {
    if (spent[i].empty()) continue;
    lp.add_constraint(spent[i],
                      alpha_var[i] >= 0 ? Relation::equal : Relation::less_equal,
                      instance.budget(i));
  }
  const LpSolution alloc = solve_lp(lp);
  if (alloc.status != LpStatus::optimal) return std::nullopt;
  out.x = Matrix::Zero(n, m);
  for (std::size_t k = 0; k < tight.size(); ++k) {
    out.x(tight[k].first, tight[k].second) =
        std::max(0.0, alloc.values(static_cast<int>(k)));
  }
  out.b = out.x * out.p.asDiagonal();
  return out;
}

bool better(const FppeOutcome& a, const FppeOutcome& b) {
  const bool a_gap = a.gap <= 1e-9;
  const bool b_gap = b.gap <= 1e-9;
  if (a_gap != b_gap) return a_gap;
  return max_residual(a.residuals) < max_residual(b.residuals);
}

}  // namespace

FppeOutcome solve_fppe(const MarketInstance& instance,
                       const FppeOptions& options) {
  const int n = instance.buyers();
  const int m = instance.goods();
  const Matrix& v = instance.values();

  FppeOutcome out;
  out.x = Matrix::Zero(n, m);
  out.alpha = Vector::Ones(n);

  std::vector<int> active;
  for (int i = 0; i < n; ++i) {
    const bool wants = v.row(i).maxCoeff() > 0.0;
    if (!wants) continue;
    if (!dust_budget(instance, i)) {
      active.push_back(i);
    } else {
      out.alpha(i) = 0.0;
    }
  }

  if (!active.empty()) {
    const int k = static_cast<int>(active.size());
    double scale = 0.0;
    for (int i : active) {
      scale = std::max({scale, instance.budget(i), v.row(i).maxCoeff()});
    }
    Vector budgets(k);
    detail::ValuationGrid grid(k, std::vector<ConcaveValuation>(m));
    for (int a = 0; a < k; ++a) {
      budgets(a) = instance.budget(active[a]) / scale;
      for (int j = 0; j < m; ++j) {
        grid[a][j] = ConcaveValuation::linear(v(active[a], j) / scale);
      }
    }
    InteriorPointOptions ipm;
    ipm.max_iterations = options.max_iterations;
    const detail::EgRaw raw = detail::solve_eg(
        budgets, grid,
        options.start == FppeStart::uniform ? detail::EgStart::uniform
                                            : detail::EgStart::perturbed,
        options.seed, ipm);
    out.iterations = raw.iterations;
    for (int a = 0; a < k; ++a) {
      const int i = active[a];
      out.alpha(i) = std::min(1.0, budgets(a) / raw.u(a));
      out.x.row(i) = raw.x.row(a);
    }
  }

  // Prices are the highest paced bids; drop dust on edges that are not tight.
  out.p = Vector::Zero(m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) out.p(j) = std::max(out.p(j), out.alpha(i) * v(i, j));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const double slack = out.p(j) - out.alpha(i) * v(i, j);
      if (out.x(i, j) < 1e-13 || slack > 1e-7 * std::max(1.0, out.p(j))) {
        out.x(i, j) = 0.0;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    const double spent = out.x.row(i).dot(out.p);
    if (spent > instance.budget(i)) {
      out.x.row(i) *= instance.budget(i) / spent;
    }
  }
  out.b = out.x * out.p.asDiagonal();

  out.residuals = verify_fppe(instance, out, options.tol);
  out.gap = eg_duality_gap(instance, out);
  for (double eps : {1e-9, 1e-7, 1e-5, 1e-3}) {
    std::optional<FppeOutcome> exact = polish(instance, out, eps);
    if (!exact) continue;
    exact->residuals = verify_fppe(instance, *exact, options.tol);
    exact->gap = eg_duality_gap(instance, *exact);
    if (better(*exact, out)) out = std::move(*exact);
  }
  if (max_residual(out.residuals) > options.tol || !(out.gap <= options.tol)) {
    std::ostringstream msg;
    msg << "FPPE did not converge to tolerance " << options.tol
        << ": max residual " << max_residual(out.residuals) << ", gap "
        << out.gap;
    throw ConvergenceError(
        msg.str(), {out.residuals.begin(), out.residuals.end()}, out.gap);
  }
  return out;
}

FppeResiduals verify_fppe(const MarketInstance& instance,
                          const FppeOutcome& c, double tol) {
  const int n = instance.buyers();
  const int m = instance.goods();
  if (c.x.rows() != n || c.x.cols() != m || c.p.size() != m ||
      c.alpha.size() != n) {
    throw StructuralError("verify_fppe: candidate dimensions mismatch");
  }
  const Matrix& v = instance.values();
  FppeResiduals r{};
  const Vector sold = c.x.colwise().sum().transpose();
  const Vector spent = c.x * c.p;
  for (int j = 0; j < m; ++j) {
    r[0] = std::max(r[0], sold(j) - 1.0);
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      r[0] = std::max(r[0], -c.x(i, j));
      best = std::max(best, c.alpha(i) * v(i, j));
      if (c.x(i, j) > tol) {
        r[2] = std::max(r[2], std::abs(c.p(j) - c.alpha(i) * v(i, j)));
      }
    }
    r[3] = std::max(r[3], std::abs(c.p(j) - best));
    if (c.p(j) > tol) r[4] = std::max(r[4], std::abs(sold(j) - 1.0));
  }
  for (int i = 0; i < n; ++i) {
    r[1] = std::max(r[1], spent(i) - instance.budget(i));
    r[5] = std::max({r[5], c.alpha(i) - 1.0, -c.alpha(i)});
    if (spent(i) < instance.budget(i) - tol) {
      r[5] = std::max(r[5], 1.0 - c.alpha(i));
    }
  }
  return r;
}

double eg_duality_gap(const MarketInstance& instance, const FppeOutcome& c) {
  const int n = instance.buyers();
  const int m = instance.goods();
  const Matrix& v = instance.values();
  double primal = 0.0;
  double dual = c.p.sum();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      // Linear conjugate, forgiving bids above the price by round-off.
      if (c.alpha(i) * v(i, j) > c.p(j) * (1.0 + 1e-12) + 1e-15) return kInfinity;
    }
    const double budget = instance.budget(i);
    if (dust_budget(instance, i)) continue;
    const double value = v.row(i).dot(c.x.row(i));
    const double delta =
        c.alpha(i) >= 1.0 - 1e-12 ? std::max(0.0, budget - value) : 0.0;
    const double u = value + delta;
    primal += (u > 0.0 ? budget * std::log(u) : -kInfinity) - delta;
    dual += c.alpha(i) > 0.0
                ? budget * std::log(budget / c.alpha(i)) - budget
                : kInfinity;
  }
  return dual - primal;
}

Outcome to_outcome(const FppeOutcome& fppe) {
  return Outcome{fppe.x, fppe.b, fppe.p};
}

double utility_gap(const MarketInstance& instance, const Matrix& x,
                   const Vector& p, int buyer) {
  const int m = instance.goods();
  LinearProgram lp(m);
  Vector price_row = p;
  double current = 0.0;
  for (int j = 0; j < m; ++j) {
    const double surplus = instance.value(buyer, j) - p(j);
    lp.set_objective(j, surplus);
    lp.set_bounds(j, 0.0, 1.0);
    current += surplus * x(buyer, j);
  }
  lp.add_constraint(price_row, Relation::less_equal, instance.budget(buyer));
  const LpSolution sol = solve_lp(lp);
  return std::max(0.0, sol.objective - current);
}

FppeCertificate fppe_revenue_certificate(const MarketInstance& instance,
                                         double tol) {
  FppeOptions options;
  options.tol = tol;
  const FppeOutcome fppe = solve_fppe(instance, options);
  FppeCertificate cert;
  cert.fppe_revenue = fppe.b.sum();
  cert.rmvup_revenue = solve_rmvup(instance).revenue;
  cert.ratio = cert.rmvup_revenue > 0.0 ? cert.fppe_revenue / cert.rmvup_revenue
                                        : 1.0;
  cert.liquid_welfare = liquid_welfare(instance, fppe.x);
  std::string failure;
  if (cert.ratio < 0.5 - 1e-6) {
    failure = "FPPE revenue below half of RMVUP";
  } else if (std::abs(cert.fppe_revenue - cert.liquid_welfare) > tol) {
    failure = "liquid welfare of the FPPE allocation differs from its revenue";
  }
  if (!failure.empty()) {
    throw CertificateError(failure + " on instance " + dump_instance(instance));
  }
  return cert;
}

}  // namespace pacing
