#include "pacing/generators.hpp"

#include <algorithm>
#include <set>

#include "pacing/rmfup.hpp"

namespace pacing {

MarketInstance gen_lower_bound_family(int n) {
  if (n < 2) throw StructuralError("lower-bound family needs n >= 2");
  Vector budgets = Vector::Ones(n);
  budgets(0) = n;
  return MarketInstance(budgets, n * budgets);
}

AdversarialArrivals gen_adversarial_online() { return {}; }

InstanceGenerator::InstanceGenerator(const SuiteConfig& config,
                                     std::uint64_t stream)
    : config_(config) {
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                    static_cast<std::uint32_t>(config.seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  rng_.seed(seq);
}

int InstanceGenerator::uniform_int(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng_);
}

double InstanceGenerator::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng_);
}

double InstanceGenerator::sparse_value() {
  const bool zero = uniform(0.0, 1.0) < config_.sparsity;
  const double v = uniform(config_.min_value, config_.max_value);
  return zero ? 0.0 : v;
}

MarketInstance InstanceGenerator::static_instance() {
  const int n = uniform_int(config_.min_buyers, config_.max_buyers);
  const int m = uniform_int(config_.min_goods, config_.max_goods);
  Vector budgets(n);
  Matrix values(n, m);
  for (int i = 0; i < n; ++i) {
    budgets(i) = uniform(config_.min_budget, config_.max_budget);
    for (int j = 0; j < m; ++j) values(i, j) = sparse_value();
  }
  return MarketInstance(budgets, values);
}

OnlineInstance InstanceGenerator::online_instance() {
  const int n = uniform_int(config_.min_buyers, config_.max_buyers);
  const int m = uniform_int(config_.min_goods, config_.max_goods);
  const int T = uniform_int(config_.min_rounds, config_.max_rounds);
  std::vector<OnlineBuyer> buyers;
  for (int i = 0; i < n; ++i) {
    OnlineBuyer b;
    b.budget = uniform(config_.min_budget, config_.max_budget);
    b.arrival = uniform_int(1, T);
    b.departure = uniform_int(b.arrival, T);
    b.values = Vector(m);
    for (int j = 0; j < m; ++j) b.values(j) = sparse_value();
    buyers.push_back(std::move(b));
  }
  return OnlineInstance(T, m, std::move(buyers));
}

ConcaveMarket InstanceGenerator::concave_market(ConcaveKind kind) {
  const int n = uniform_int(config_.min_buyers, config_.max_buyers);
  const int m = uniform_int(config_.min_goods, config_.max_goods);
  Vector budgets(n);
  std::vector<std::vector<ConcaveValuation>> grid(n, std::vector<ConcaveValuation>(m));
  for (int i = 0; i < n; ++i) {
    budgets(i) = uniform(config_.min_budget, config_.max_budget);
    for (int j = 0; j < m; ++j) {
      const bool zero = uniform(0.0, 1.0) < config_.sparsity;
      bool power = kind == ConcaveKind::shifted_power;
      if (kind == ConcaveKind::mixed) power = uniform(0.0, 1.0) < 0.5;
      if (power) {
        const double c = uniform(0.2, 1.0);
        const double s = uniform(0.2, 2.0);
        const double a = uniform(0.3, 0.9);
        grid[i][j] = ConcaveValuation::shifted_power(zero ? 0.0 : c, s, a);
      } else {
        const int pieces = uniform_int(2, 4);
        std::vector<double> slopes(pieces), xs(pieces - 1);
        for (auto& s : slopes) s = uniform(0.05, 1.0);
        for (auto& x : xs) x = uniform(0.05, 0.95);
        std::sort(slopes.rbegin(), slopes.rend());
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        xs.push_back(1.0);
        std::vector<ConcaveValuation::Point> points{{0.0, 0.0}};
        for (std::size_t k = 0; k < xs.size(); ++k) {
          const double slope = zero ? 0.0 : slopes[k];
          points.emplace_back(xs[k], points.back().second + slope * (xs[k] - points.back().first));
        }
        grid[i][j] = ConcaveValuation::piecewise_linear(std::move(points));
      }
    }
  }
  return ConcaveMarket(budgets, std::move(grid));
}

ThreeDTwoMatching InstanceGenerator::three_d_two_matching(int triplets) {
  if (triplets < 2 || triplets % 2 != 0) {
    throw StructuralError(
        "every element in exactly two triplets needs an even number of triplets");
  }
  const int per_set = triplets / 2;
  std::array<std::vector<std::string>, 3> names;
  const char prefix[3] = {'a', 'b', 'c'};
  for (int k = 0; k < 3; ++k) {
    for (int e = 0; e < per_set; ++e) {
      names[k].push_back(std::string(1, prefix[k]) + std::to_string(e + 1));
    }
  }
  std::vector<int> incidence;
  for (int e = 0; e < per_set; ++e) incidence.insert(incidence.end(), {e, e});
  std::vector<ThreeDTwoMatching::Triplet> s;
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::array<std::vector<int>, 3> lists{incidence, incidence, incidence};
    for (auto& list : lists) std::shuffle(list.begin(), list.end(), rng_);
    s.clear();
    std::set<ThreeDTwoMatching::Triplet> seen;
    for (int t = 0; t < triplets; ++t) {
      s.push_back({lists[0][t], lists[1][t], lists[2][t]});
      seen.insert(s.back());
    }
    if (static_cast<int>(seen.size()) == triplets) break;
  }
  return ThreeDTwoMatching(names[0], names[1], names[2], std::move(s));
}

Outcome InstanceGenerator::random_priced_solution(const MarketInstance& market) {
  Vector p(market.goods());
  for (int j = 0; j < p.size(); ++j) p(j) = uniform(0.0, 1.2);
  Outcome out = allocate_given_prices(market, p);
  for (int i = 0; i < market.buyers(); ++i) {
    const double keep = uniform(0.3, 1.0);
    out.x.row(i) *= keep;
    out.b.row(i) *= keep;
  }
  return out;
}

Vector InstanceGenerator::budget_increase(int buyers) {
  Vector delta = Vector::Zero(buyers);
  for (int i = 0; i < buyers; ++i) {
    const bool raise = uniform(0.0, 1.0) < 0.5;
    const double amount = uniform(0.0, 1.0);
    if (raise) delta(i) = amount;
  }
  return delta;
}

}  // namespace pacing
