#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pacing/fppe.hpp"
#include "pacing/market.hpp"
#include "pacing/valuation.hpp"

namespace pacing {

class ConcaveMarket {
 public:
  ConcaveMarket(Vector budgets,
                std::vector<std::vector<ConcaveValuation>> valuations);
  static ConcaveMarket from_linear(const MarketInstance& instance);

  int buyers() const { return static_cast<int>(budgets_.size()); }
  int goods() const { return static_cast<int>(valuations_.front().size()); }
  const Vector& budgets() const { return budgets_; }
  double budget(int i) const { return budgets_(i); }
  const ConcaveValuation& valuation(int i, int j) const { return valuations_[i][j]; }
  const std::vector<std::vector<ConcaveValuation>>& valuations() const {
    return valuations_;
  }

 private:
  Vector budgets_;
  std::vector<std::vector<ConcaveValuation>> valuations_;
};

// One entry per KKT line: alpha = B/u, paced marginal values against
// prices, utility constraint slack, supply slack, unpaced budget excess.
using KktResiduals = std::array<double, 5>;

struct EgSolution {
  Matrix x;
  Vector u;
  Vector delta;
  Vector alpha;  // 0 for zero-budget buyers, which are left out
  Vector p;
  Matrix payments;  // p_j x_ij
  double gap = 0.0;
  KktResiduals kkt{};
  int iterations = 0;
};

struct ConcaveOptions {
  double tol = kEquilibriumTol;
  FppeStart start = FppeStart::uniform;
  std::uint64_t seed = 0;
  int max_iterations = 400;
};

// Throws ConvergenceError unless the KKT residuals and duality gap are
// within options.tol.
EgSolution solve_concave_eg(const ConcaveMarket& market,
                            const ConcaveOptions& options = {});

KktResiduals kkt_residuals(const ConcaveMarket& market,
                           const EgSolution& candidate,
                           double tol = kEquilibriumTol);

double eg_duality_gap(const ConcaveMarket& market, const EgSolution& candidate);

// max over valued pairs of v'(0) / v'(1); +infinity when some v'(0) is.
// Throws StructuralError when a valued pair has v'(1) = 0.
double rho_general(const ConcaveMarket& market);

class RhoRefused : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// log(1 + max ratio); throws RhoRefused unless x v'(x) is nondecreasing on
// [0, 1] for every valued pair.
double rho_log(const ConcaveMarket& market);

struct ConcaveBound {
  double inner = 0.0;  // value under secant (under-) approximations
  double outer = 0.0;  // value under tangent (over-) approximations
  double error() const { return outer - inner; }
  Matrix x;
  Matrix b;
};

// Revenue maximization with b_ij <= v_ij(x_ij), bracketed by K-segment
// secant and tangent approximations of each valuation.
ConcaveBound rmvup_concave(const ConcaveMarket& market, int segments = 64);

// Maximum of sum_i min(sum_j v_ij(x_ij), B_i), bracketed the same way.
ConcaveBound max_liquid_welfare_concave(const ConcaveMarket& market,
                                        int segments = 64);

double liquid_welfare(const ConcaveMarket& market, const Matrix& x);

// Best bundle at prices p within buyer i's budget minus the current one.
double utility_gap(const ConcaveMarket& market, const Matrix& x,
                   const Vector& p, int buyer);

struct ConcavePropertyReport {
  double individual_rationality = 0.0;  // max_ij p_j x_ij - v_ij(x_ij)
  double budget = 0.0;                  // max_i spend_i - B_i
  double full_sale = 0.0;               // max over priced goods |1 - sold|
  int unsatisfied_buyers = 0;           // neither utility-maximizing nor
                                        // spending B_i / rho
};

ConcavePropertyReport concave_properties(const ConcaveMarket& market,
                                         const EgSolution& solution,
                                         double rho,
                                         double tol = kEquilibriumTol);

struct ConcaveCertificate {
  double eg_revenue = 0.0;
  double rmvup_inner = 0.0;
  double rmvup_outer = 0.0;
  double rho = 1.0;
  std::optional<double> rho_log;
  double bound = 0.0;  // rmvup_outer / (rho (rho + 1))
  bool bound_ok = false;
  double liquid_welfare = 0.0;
  double max_liquid_welfare = 0.0;  // outer value
  double lw_ratio = 1.0;
  EgSolution solution;
};

// Throws CertificateError when the revenue bound fails and StructuralError
// when rho is infinite.
ConcaveCertificate concave_revenue_certificate(const ConcaveMarket& market,
                                               const ConcaveOptions& options = {});

}  // namespace pacing
