#include "pacing/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

#include "pacing/lp.hpp"
#include "pacing/rmfup.hpp"

namespace pacing {

namespace {

constexpr double kThird = 1.0 / 3.0;
constexpr double kTwoThirds = 2.0 / 3.0;
constexpr double kExact = 1e-9;

bool near(double a, double b) { return std::abs(a - b) <= kExact; }

}  // namespace

ThreeDTwoMatching::ThreeDTwoMatching(std::vector<std::string> e1,
                                     std::vector<std::string> e2,
                                     std::vector<std::string> e3,
                                     std::vector<Triplet> triplets)
    : sets_{std::move(e1), std::move(e2), std::move(e3)},
      triplets_(std::move(triplets)) {
  if (triplets_.empty()) {
    throw StructuralError("3D-2-M instance needs at least one triplet");
  }
  for (const auto& names : sets_) {
    if (std::set<std::string>(names.begin(), names.end()).size() != names.size()) {
      throw StructuralError("element names must be unique within a set");
    }
  }
  for (const auto& t : triplets_) {
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= static_cast<int>(sets_[k].size())) {
        throw StructuralError("triplet refers to an unknown element");
      }
    }
  }
  for (int d : degrees()) {
    if (d < 1 || d > 2) {
      throw StructuralError("every element must lie in one or two triplets");
    }
  }
}

int ThreeDTwoMatching::elements() const {
  return static_cast<int>(sets_[0].size() + sets_[1].size() + sets_[2].size());
}

std::array<int, 3> ThreeDTwoMatching::members(int s) const {
  const auto& t = triplets_.at(s);
  const int o1 = static_cast<int>(sets_[0].size());
  const int o2 = o1 + static_cast<int>(sets_[1].size());
  return {t[0], o1 + t[1], o2 + t[2]};
}

std::vector<int> ThreeDTwoMatching::degrees() const {
  std::vector<int> deg(elements(), 0);
  for (int s = 0; s < size(); ++s) {
    for (int e : members(s)) ++deg[e];
  }
  return deg;
}

bool ThreeDTwoMatching::exactly_two() const {
  const auto deg = degrees();
  return std::all_of(deg.begin(), deg.end(), [](int d) { return d == 2; });
}

bool ThreeDTwoMatching::is_matching(const std::vector<int>& chosen) const {
  std::vector<bool> used(elements(), false);
  for (int s : chosen) {
    if (s < 0 || s >= size()) return false;
    for (int e : members(s)) {
      if (used[e]) return false;
      used[e] = true;
    }
  }
  return true;
}

MarketInstance to_rmfup_instance(const ThreeDTwoMatching& tdm) {
  const int k = tdm.elements();
  const int m = tdm.size();
  Vector budgets(k + m);
  Matrix values = Matrix::Zero(k + m, m);
  budgets.head(k).setConstant(kThird);
  budgets.tail(m).setConstant(kTwoThirds);
  for (int s = 0; s < m; ++s) {
    for (int e : tdm.members(s)) values(e, s) = 1.0;
    values(k + s, s) = kTwoThirds;
  }
  return MarketInstance(budgets, values);
}

ReductionLayout recognize_reduction(const MarketInstance& market) {
  const int n = market.buyers();
  const int m = market.goods();
  const int k = n - m;
  auto refuse = [](const char* why) {
    throw StructuralError(std::string("not a reduced 3D-2-M market: ") + why);
  };
  if (k < 3) refuse("too few element buyers");
  ReductionLayout layout{k, m, {}};
  for (int s = 0; s < m; ++s) {
    const int special = k + s;
    if (!near(market.budget(special), kTwoThirds)) refuse("special budget");
    for (int j = 0; j < m; ++j) {
      const double expected = j == s ? kTwoThirds : 0.0;
      if (!near(market.value(special, j), expected)) refuse("special values");
    }
  }
  std::vector<std::vector<int>> incident(m);
  for (int e = 0; e < k; ++e) {
    if (!near(market.budget(e), kThird)) refuse("element budget");
    for (int j = 0; j < m; ++j) {
      const double v = market.value(e, j);
      if (near(v, 1.0)) {
        incident[j].push_back(e);
      } else if (!near(v, 0.0)) {
        refuse("element values must be 0 or 1");
      }
    }
  }
  for (const auto& list : incident) {
    if (list.size() != 3) refuse("each good needs three element buyers");
    layout.incident.push_back({list[0], list[1], list[2]});
  }
  return layout;
}

Outcome round_solution(const MarketInstance& market, const Outcome& solution) {
  const ReductionLayout layout = recognize_reduction(market);
  if (!solution.p) throw StructuralError("rounding needs a price vector");
  if (!validate(market, solution, PricingMode::fixed).feasible()) {
    throw StructuralError("rounding needs a feasible fixed-price solution");
  }
  const int k = layout.elements;
  const int m = layout.goods;
  Matrix b = solution.b;
  Vector p = *solution.p;

  // Phase I
  for (int s = 0; s < m; ++s) p(s) = p(s) <= kTwoThirds + kExact ? kTwoThirds : 1.0;

  auto give_to_special = [&](int s) {
    b.col(s).setZero();
    b(k + s, s) = kTwoThirds;
    p(s) = kTwoThirds;
  };
  // Phase II
  for (int s = 0; s < m; ++s) {
    if (b.col(s).sum() <= kTwoThirds + kExact) give_to_special(s);
  }
  // Phase III
  for (int e = 0; e < k; ++e) {
    if (!(b.row(e).sum() > 0.0)) continue;
    int chosen = 0;
    b.row(e).maxCoeff(&chosen);
    b.row(e).setZero();
    b(e, chosen) = kThird;
  }
  // Phase IV
  for (int s = 0; s < m; ++s) {
    if (p(s) == 1.0 && b.col(s).head(k).sum() <= kTwoThirds + kExact) {
      give_to_special(s);
    }
  }

  Outcome out = Outcome::zero(market.buyers(), m);
  out.b = b;
  for (int s = 0; s < m; ++s) out.x.col(s) = b.col(s) / p(s);
  out.p = p;
  return out;
}

std::string normal_form_defect(const MarketInstance& market,
                               const Outcome& rounded) {
  const ReductionLayout layout = recognize_reduction(market);
  if (!rounded.p) return "missing prices";
  const Vector& p = *rounded.p;
  const int k = layout.elements;
  for (int s = 0; s < layout.goods; ++s) {
    const std::string good = "good " + std::to_string(s) + ": ";
    if (near(p(s), kTwoThirds)) {
      for (int i = 0; i < market.buyers(); ++i) {
        const bool special = i == k + s;
        if (!near(rounded.x(i, s), special ? 1.0 : 0.0) ||
            !near(rounded.b(i, s), special ? kTwoThirds : 0.0)) {
          return good + "priced 2/3 but not sold wholly to its special buyer";
        }
      }
    } else if (near(p(s), 1.0)) {
      const auto& inc = layout.incident[s];
      for (int i = 0; i < market.buyers(); ++i) {
        const bool member = std::find(inc.begin(), inc.end(), i) != inc.end();
        if (!near(rounded.x(i, s), member ? kThird : 0.0) ||
            !near(rounded.b(i, s), member ? kThird : 0.0)) {
          return good + "priced 1 but not split among its three elements";
        }
      }
    } else {
      return good + "price outside {2/3, 1}";
    }
  }
  return {};
}

std::vector<int> extract_matching(const MarketInstance& market,
                                  const Outcome& rounded) {
  const ReductionLayout layout = recognize_reduction(market);
  if (!rounded.p) throw StructuralError("matching extraction needs prices");
  std::vector<int> chosen;
  std::vector<bool> used(layout.elements, false);
  for (int s = 0; s < layout.goods; ++s) {
    if (!near((*rounded.p)(s), 1.0)) continue;
    for (int e : layout.incident[s]) {
      if (used[e]) {
        throw std::logic_error("extracted triplets share element buyer " +
                               std::to_string(e));
      }
      used[e] = true;
    }
    chosen.push_back(s);
  }
  return chosen;
}

std::vector<int> brute_force_3d2m(const ThreeDTwoMatching& tdm) {
  const int m = tdm.size();
  if (m > 20) throw StructuralError("brute-force matching is capped at 20 triplets");
  std::vector<bool> used(tdm.elements(), false);
  std::vector<int> current, best;
  std::function<void(int)> search = [&](int s) {
    if (current.size() > best.size()) best = current;
    if (s == m || current.size() + (m - s) <= best.size()) return;
    const auto members = tdm.members(s);
    if (!used[members[0]] && !used[members[1]] && !used[members[2]]) {
      for (int e : members) used[e] = true;
      current.push_back(s);
      search(s + 1);
      current.pop_back();
      for (int e : members) used[e] = false;
    }
    search(s + 1);
  };
  search(0);
  return best;
}

TransferReport approximation_transfer_check(const ThreeDTwoMatching& tdm,
                                            double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw StructuralError("rho must lie in (0, 1]");
  const int m = tdm.size();
  if (m > 19) throw StructuralError("price enumeration is capped at 19 triplets");
  const MarketInstance market = to_rmfup_instance(tdm);

  const std::size_t total = std::size_t{1} << m;
  std::vector<double> revenues(total);
  auto prices = [m](std::size_t mask) {
    Vector p(m);
    for (int s = 0; s < m; ++s) p(s) = (mask >> s) & 1 ? 1.0 : kTwoThirds;
    return p;
  };
  for (std::size_t mask = 0; mask < total; ++mask) {
    revenues[mask] = revenue(allocate_given_prices(market, prices(mask)));
  }

  TransferReport report;
  report.triplets = m;
  report.optimum_revenue = *std::max_element(revenues.begin(), revenues.end());
  std::size_t chosen = 0;
  double chosen_revenue = kInfinity;
  for (std::size_t mask = 0; mask < total; ++mask) {
    if (revenues[mask] >= rho * report.optimum_revenue - 1e-12 &&
        revenues[mask] < chosen_revenue - 1e-12) {
      chosen = mask;
      chosen_revenue = revenues[mask];
    }
  }
  report.chosen_revenue = chosen_revenue;
  const Outcome rounded =
      round_solution(market, allocate_given_prices(market, prices(chosen)));
  report.rounded_revenue = revenue(rounded);
  report.extracted = static_cast<int>(extract_matching(market, rounded).size());
  report.optimum_matching = static_cast<int>(brute_force_3d2m(tdm).size());
  report.identity_revenue =
      kTwoThirds * (m - report.optimum_matching) + report.optimum_matching;
  report.identity_ok =
      std::abs(report.optimum_revenue - report.identity_revenue) <= kExact;
  report.rho = chosen_revenue / report.optimum_revenue;
  report.bound = 9.0 * report.rho - 8.0;
  report.transfer_ok =
      report.extracted >= report.bound * report.optimum_matching - kExact;
  report.size_bound_ok = m <= 4 * report.optimum_matching;
  return report;
}

}  // namespace pacing
