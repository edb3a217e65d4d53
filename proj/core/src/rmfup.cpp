#include "pacing/rmfup.hpp"

#include <algorithm>
#include <set>
#include <thread>

#include "pacing/lp.hpp"

namespace pacing {

namespace {

constexpr double kPriceMatch = 1e-12;

double single_good_revenue(const MarketInstance& instance, int good, double p) {
  double demand = 0.0;
  for (int i = 0; i < instance.buyers(); ++i) {
    if (instance.value(i, good) >= p - kPriceMatch) demand += instance.budget(i);
  }
  return std::min(p, demand);
}

std::vector<double> single_good_candidates(const MarketInstance& instance,
                                           int good) {
  std::set<double> out{0.0};
  for (int i = 0; i < instance.buyers(); ++i) {
    const double level = instance.value(i, good);
    out.insert(level);
    double demand = 0.0;
    for (int k = 0; k < instance.buyers(); ++k) {
      if (instance.value(k, good) >= level) demand += instance.budget(k);
    }
    out.insert(demand);
  }
  return {out.begin(), out.end()};
}

FixedPriceResult evaluate(const MarketInstance& instance, const Vector& p) {
  FixedPriceResult r;
  r.p = p;
  r.outcome = allocate_given_prices(instance, p);
  r.revenue = revenue(r.outcome);
  return r;
}

}  // namespace

Outcome allocate_given_prices(const MarketInstance& instance, const Vector& p) {
  const int n = instance.buyers();
  const int m = instance.goods();
  if (p.size() != m) throw StructuralError("price vector length must equal m");
  if ((p.array() < 0.0).any() || !p.allFinite()) {
    throw StructuralError("prices must be finite and nonnegative");
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (p(j) > 0.0 && instance.value(i, j) >= p(j) - kPriceMatch) {
        pairs.emplace_back(i, j);
      }
    }
  }
  Outcome out = Outcome::zero(n, m);
  out.p = p;
  if (pairs.empty()) return out;

  const int k = static_cast<int>(pairs.size());
  LinearProgram lp(k);
  std::vector<std::vector<std::pair<int, double>>> supply(m), budget(n);
  for (int e = 0; e < k; ++e) {
    const auto [i, j] = pairs[e];
    lp.set_objective(e, p(j));
    supply[j].emplace_back(e, 1.0);
    budget[i].emplace_back(e, p(j));
  }
  for (int j = 0; j < m; ++j) {
    if (!supply[j].empty()) lp.add_constraint(supply[j], Relation::less_equal, 1.0);
  }
  for (int i = 0; i < n; ++i) {
    if (!budget[i].empty()) {
      lp.add_constraint(budget[i], Relation::less_equal, instance.budget(i));
    }
  }
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal) {
    throw std::logic_error("fixed-price allocation LP reported " +
                           to_string(sol.status));
  }
  for (int e = 0; e < k; ++e) {
    const auto [i, j] = pairs[e];
    out.x(i, j) = std::clamp(sol.values(e), 0.0, 1.0);
    out.b(i, j) = p(j) * out.x(i, j);
  }
  return out;
}

FixedPriceResult solve_rmfup_single_good(const MarketInstance& instance) {
  if (instance.goods() != 1) {
    throw StructuralError("single-good RMFUP solver needs exactly one good");
  }
  double best_p = 0.0;
  double best = 0.0;
  for (double p : single_good_candidates(instance, 0)) {
    const double r = single_good_revenue(instance, 0, p);
    if (r > best) {
      best = r;
      best_p = p;
    }
  }
  return evaluate(instance, Vector::Constant(1, best_p));
}

FixedPriceResult solve_rmfup_enumerate(
    const MarketInstance& instance,
    const std::vector<std::vector<double>>& candidates, std::size_t cap,
    int threads) {
  const int m = instance.goods();
  if (static_cast<int>(candidates.size()) != m) {
    throw StructuralError("need one candidate set per good");
  }
  std::size_t total = 1;
  for (const auto& c : candidates) {
    if (c.empty()) throw StructuralError("candidate sets must be nonempty");
    if (total > cap / c.size()) {
      throw EnumerationCapExceeded("candidate grid exceeds the enumeration cap");
    }
    total *= c.size();
  }
  auto price_at = [&](std::size_t index) {
    Vector p(m);
    for (int j = 0; j < m; ++j) {
      p(j) = candidates[j][index % candidates[j].size()];
      index /= candidates[j].size();
    }
    return p;
  };

  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(total)));
  std::vector<std::size_t> best_index(workers, 0);
  std::vector<double> best_revenue(workers, -1.0);
  auto work = [&](int w) {
    for (std::size_t idx = w; idx < total; idx += workers) {
      const double r = revenue(allocate_given_prices(instance, price_at(idx)));
      if (r > best_revenue[w] + 1e-12) {
        best_revenue[w] = r;
        best_index[w] = idx;
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  std::size_t winner = best_index[0];
  double top = best_revenue[0];
  for (int w = 1; w < workers; ++w) {
    if (best_revenue[w] > top + 1e-12 ||
        (best_revenue[w] > top - 1e-12 && best_index[w] < winner)) {
      top = std::max(top, best_revenue[w]);
      winner = best_index[w];
    }
  }
  return evaluate(instance, price_at(winner));
}

FixedPriceResult solve_rmfup_heuristic(const MarketInstance& instance,
                                       double delta) {
  if (!(delta > 0.0)) throw StructuralError("grid resolution must be positive");
  const int m = instance.goods();
  std::vector<std::vector<double>> levels(m);
  Vector p(m);
  for (int j = 0; j < m; ++j) {
    levels[j] = single_good_candidates(instance, j);
    double best = -1.0;
    for (double c : levels[j]) {
      const double r = single_good_revenue(instance, j, c);
      if (r > best) {
        best = r;
        p(j) = c;
      }
    }
  }
  FixedPriceResult incumbent = evaluate(instance, p);

  auto try_price = [&](int j, double price) {
    if (price < 0.0) return false;
    Vector q = incumbent.p;
    q(j) = price;
    FixedPriceResult r = evaluate(instance, q);
    if (r.revenue > incumbent.revenue + 1e-12) {
      incumbent = std::move(r);
      return true;
    }
    return false;
  };

  for (int sweep = 0; sweep < 20; ++sweep) {
    bool improved = false;
    for (int j = 0; j < m; ++j) {
      for (double c : levels[j]) improved = try_price(j, c) || improved;
    }
    if (!improved) break;
  }
  for (double step = delta; step > 1e-6; step *= 0.5) {
    bool improved = true;
    for (int pass = 0; improved && pass < 100; ++pass) {
      improved = false;
      for (int j = 0; j < m; ++j) {
        const double base = incumbent.p(j);
        improved = try_price(j, base * (1.0 + step)) || improved;
        improved = try_price(j, base * (1.0 - step)) || improved;
      }
    }
  }
  return incumbent;
}

}  // namespace pacing
