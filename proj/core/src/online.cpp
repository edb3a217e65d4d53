#include "pacing/online.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pacing/io.hpp"
#include "pacing/rmvup.hpp"

namespace pacing {

namespace {

const double kSqrt2 = std::sqrt(2.0);

class StaticArrivals final : public ArrivalSource {
 public:
  explicit StaticArrivals(const OnlineInstance& instance) : instance_(instance) {}
  int horizon() const override { return instance_.horizon(); }
  int goods() const override { return instance_.goods(); }
  int max_buyers() const override { return instance_.buyers(); }
  std::vector<std::pair<int, OnlineBuyer>> reveal(int round,
                                                  const OnlineTrace&) override {
    std::vector<std::pair<int, OnlineBuyer>> out;
    for (int i = 0; i < instance_.buyers(); ++i) {
      if (instance_.buyer(i).arrival == round) out.emplace_back(i, instance_.buyer(i));
    }
    return out;
  }

 private:
  const OnlineInstance& instance_;
};

FppeOutcome empty_outcome(int n, int m) {
  FppeOutcome out;
  out.x = Matrix::Zero(n, m);
  out.b = Matrix::Zero(n, m);
  out.p = Vector::Zero(m);
  out.alpha = Vector::Zero(n);
  return out;
}

// Solves the FPPE over `buyers` and scatters it back into n x m.
FppeOutcome solve_on_subset(const std::vector<int>& buyers,
                            const std::vector<Vector>& values,
                            const Vector& budgets, int n, int m,
                            const FppeOptions& options) {
  FppeOutcome full = empty_outcome(n, m);
  if (buyers.empty()) return full;
  const int k = static_cast<int>(buyers.size());
  Matrix v(k, m);
  Vector b(k);
  for (int a = 0; a < k; ++a) {
    v.row(a) = values[buyers[a]].transpose();
    b(a) = budgets(buyers[a]);
  }
  const FppeOutcome sub = solve_fppe(MarketInstance(b, v), options);
  for (int a = 0; a < k; ++a) {
    full.x.row(buyers[a]) = sub.x.row(a);
    full.b.row(buyers[a]) = sub.b.row(a);
    full.alpha(buyers[a]) = sub.alpha(a);
  }
  full.p = sub.p;
  full.gap = sub.gap;
  full.residuals = sub.residuals;
  full.iterations = sub.iterations;
  return full;
}

}  // namespace

OnlineInstance::OnlineInstance(int horizon, int goods,
                               std::vector<OnlineBuyer> buyers)
    : horizon_(horizon), goods_(goods), buyers_(std::move(buyers)) {
  if (horizon_ < 1) throw StructuralError("online instance needs T >= 1");
  if (goods_ < 1) throw StructuralError("online instance needs m >= 1");
  if (buyers_.empty()) throw StructuralError("online instance needs a buyer");
  for (const auto& b : buyers_) {
    if (!(b.budget >= 0.0) || !std::isfinite(b.budget)) {
      throw StructuralError("online budgets must be finite and nonnegative");
    }
    if (b.arrival < 1 || b.arrival > b.departure || b.departure > horizon_) {
      throw StructuralError("online interval must satisfy 1 <= s <= t <= T");
    }
    if (b.values.size() != goods_) {
      throw StructuralError("online valuation length must equal m");
    }
    if (!b.values.allFinite() || (b.values.array() < 0.0).any()) {
      throw StructuralError("online values must be finite and nonnegative");
    }
  }
}

OnlineTrace run_online_fppe(ArrivalSource& source, const FppeOptions& options) {
  const int n = source.max_buyers();
  const int m = source.goods();
  OnlineTrace trace;
  trace.revealed.assign(n, false);
  trace.initial_budgets = Vector::Zero(n);
  std::vector<Vector> values(n, Vector::Zero(m));
  std::vector<int> departure(n, 0);
  Vector remaining = Vector::Zero(n);

  for (int t = 1; t <= source.horizon(); ++t) {
    for (auto& [id, buyer] : source.reveal(t, trace)) {
      if (id < 0 || id >= n || trace.revealed[id] || buyer.arrival != t ||
          buyer.values.size() != m) {
        throw StructuralError("arrival source revealed an inconsistent buyer");
      }
      trace.revealed[id] = true;
      trace.initial_budgets(id) = buyer.budget;
      remaining(id) = buyer.budget;
      values[id] = buyer.values;
      departure[id] = buyer.departure;
    }
    OnlineRound round;
    round.round = t;
    round.budgets = remaining;
    for (int i = 0; i < n; ++i) {
      if (trace.revealed[i] && t <= departure[i]) round.active.push_back(i);
    }
    try {
      round.outcome = solve_on_subset(round.active, values, remaining, n, m, options);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("round " + std::to_string(t) + ": " + e.what(),
                             e.residuals(), e.gap());
    }
    round.revenue = round.outcome.b.sum();
    for (int i : round.active) {
      remaining(i) -= round.outcome.b.row(i).sum();
      if (std::abs(remaining(i)) < kFeasibilityTol) remaining(i) = 0.0;
    }
    trace.revenue += round.revenue;
    trace.rounds.push_back(std::move(round));
  }
  trace.final_budgets = remaining;
  return trace;
}

OnlineTrace run_online_fppe(const OnlineInstance& instance,
                            const FppeOptions& options) {
  StaticArrivals source(instance);
  return run_online_fppe(source, options);
}

MarketInstance flatten_offline(const OnlineInstance& instance) {
  const int n = instance.buyers();
  const int m = instance.goods();
  const int T = instance.horizon();
  Vector budgets(n);
  Matrix values = Matrix::Zero(n, m * T);
  for (int i = 0; i < n; ++i) {
    budgets(i) = instance.buyer(i).budget;
    for (int t = 1; t <= T; ++t) {
      if (!instance.active(i, t)) continue;
      values.block(i, (t - 1) * m, 1, m) = instance.buyer(i).values.transpose();
    }
  }
  return MarketInstance(budgets, values);
}

CompetitiveRatio competitive_ratio(const OnlineInstance& instance,
                                   const FppeOptions& options) {
  CompetitiveRatio r;
  r.online_revenue = run_online_fppe(instance, options).revenue;
  r.offline_revenue = solve_rmvup(flatten_offline(instance)).revenue;
  r.ratio = r.offline_revenue > 0.0 ? r.online_revenue / r.offline_revenue : 1.0;
  if (r.ratio < 0.25 - 1e-6) {
    throw CertificateError("online FPPE below a quarter of the offline optimum "
                           "on instance " + dump_online_instance(instance));
  }
  return r;
}

std::vector<IntermediateRound> intermediate_solution(
    const OnlineInstance& instance, const OnlineTrace& trace,
    const Outcome& offline, const FppeOptions& options) {
  const int n = instance.buyers();
  const int m = instance.goods();
  const int T = instance.horizon();
  if (static_cast<int>(trace.rounds.size()) != T || offline.b.rows() != n ||
      offline.b.cols() != m * T) {
    throw StructuralError("intermediate solution: trace or offline outcome "
                          "does not match the instance");
  }
  std::vector<Vector> values(n);
  for (int i = 0; i < n; ++i) values[i] = instance.buyer(i).values;

  std::vector<IntermediateRound> rounds;
  for (int t = 1; t <= T; ++t) {
    const OnlineRound& online = trace.rounds[t - 1];
    IntermediateRound r;
    r.offline_spend = offline.b.block(0, (t - 1) * m, n, m).rowwise().sum();
    r.budgets = Vector::Zero(n);
    for (int i : online.active) {
      r.budgets(i) = std::max(r.offline_spend(i), online.budgets(i));
    }
    r.outcome = solve_on_subset(online.active, values, r.budgets, n, m, options);
    rounds.push_back(std::move(r));
  }
  return rounds;
}

ComparisonReport comparison_checks(const OnlineInstance& instance,
                                   const FppeOptions& options) {
  constexpr double kSlack = 1e-6;
  const int n = instance.buyers();
  const OnlineTrace trace = run_online_fppe(instance, options);
  const Outcome offline = solve_rmvup(flatten_offline(instance)).outcome;
  const auto hat = intermediate_solution(instance, trace, offline, options);

  ComparisonReport report;
  Vector online_total = Vector::Zero(n);
  Vector hat_total = Vector::Zero(n);
  for (std::size_t t = 0; t < hat.size(); ++t) {
    const double lhs = hat[t].outcome.b.sum();
    const double rhs = 0.5 * hat[t].offline_spend.sum();
    report.timewise_margin = std::min(report.timewise_margin, lhs - rhs);
    if (lhs < rhs - kSlack) {
      report.timewise_ok = false;
      std::ostringstream msg;
      msg << "time-wise comparison fails at round " << t + 1 << ": " << lhs
          << " < " << rhs;
      report.violations.push_back(msg.str());
    }
    online_total += trace.rounds[t].outcome.b.rowwise().sum();
    hat_total += hat[t].outcome.b.rowwise().sum();
  }
  for (int i = 0; i < n; ++i) {
    const double lhs = online_total(i);
    const double rhs = 0.5 * hat_total(i);
    report.buyerwise_margin = std::min(report.buyerwise_margin, lhs - rhs);
    if (lhs < rhs - kSlack) {
      report.buyerwise_ok = false;
      std::ostringstream msg;
      msg << "buyer-wise comparison fails for buyer " << i << ": " << lhs
          << " < " << rhs;
      report.violations.push_back(msg.str());
    }
  }
  return report;
}

bool pacing_monotonicity_check(const MarketInstance& instance,
                               const Vector& increase,
                               const FppeOptions& options) {
  if (increase.size() != instance.buyers() || (increase.array() < 0.0).any()) {
    throw StructuralError("budget increase must be a nonnegative n-vector");
  }
  const Vector before = solve_fppe(instance, options).alpha;
  const Vector after =
      solve_fppe(instance.with_budgets(instance.budgets() + increase), options).alpha;
  return ((after - before).array() >= -10.0 * options.tol).all();
}

std::vector<std::pair<int, OnlineBuyer>> AdversarialArrivals::reveal(
    int round, const OnlineTrace& history) {
  const double big = 1.0 + kSqrt2;
  std::vector<std::pair<int, OnlineBuyer>> out;
  if (round == 1) {
    out.emplace_back(0, OnlineBuyer{1.0, 1, 1, Vector::Constant(1, 1.0)});
    out.emplace_back(1, OnlineBuyer{big, 1, 2, Vector::Constant(1, big)});
  } else if (round == 2) {
    const double share = history.rounds.at(0).outcome.x(1, 0);
    triggered_ = share < 0.5;
    if (triggered_) {
      out.emplace_back(2, OnlineBuyer{big, 2, 2, Vector::Constant(1, big)});
    }
  }
  return out;
}

AdversaryBranch adversarial_instance(double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw StructuralError("round-1 allocation must lie in [0, 1]");
  }
  const double big = 1.0 + kSqrt2;
  std::vector<OnlineBuyer> buyers{
      {1.0, 1, 1, Vector::Constant(1, 1.0)},
      {big, 1, 2, Vector::Constant(1, big)},
  };
  const bool arrival = fraction < 0.5;
  if (arrival) buyers.push_back({big, 2, 2, Vector::Constant(1, big)});
  AdversaryBranch branch{arrival, OnlineInstance(2, 1, std::move(buyers)), 0.0,
                         0.0, 0.0};
  const MarketInstance flat = flatten_offline(branch.instance);
  branch.offline = solve_rmvup(flat).revenue;
  // A seller who knows the rule can do no better than the offline optimum
  // restricted to round-1 splits that lead to this branch (closure of the
  // region, so the supremum is attained).
  LinearProgram lp = build_rmvup_lp(flat);
  const int share = 1 * flat.goods() + 0;
  lp.add_constraint(SparseRow{{share, 1.0}},
                    arrival ? Relation::less_equal : Relation::greater_equal, 0.5);
  const LpSolution best = solve_lp(lp);
  if (best.status != LpStatus::optimal) {
    throw std::logic_error("adversary branch LP reported " + to_string(best.status));
  }
  branch.best_online = best.objective;
  branch.ratio = branch.best_online / branch.offline;
  return branch;
}

}  // namespace pacing
