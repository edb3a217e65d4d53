#pragma once

#include <string>
#include <vector>

#include "pacing/generators.hpp"

namespace pacing {

enum class SuiteKind {
  static_markets,
  online,
  lower_bound,
  concave,
  reduction,
  monotonicity,
};

std::string to_string(SuiteKind kind);
SuiteKind parse_suite_kind(const std::string& name);

// Rows in instance order; the last column is always runtime_ms.
struct SuiteReport {
  SuiteKind kind;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int failures = 0;  // rows whose status is not "pass"

  std::string csv(bool with_header = true) const;
};

// Columns per suite (runtime_ms is appended to each):
//   static_markets: index,n,m,fppe_revenue,rmvup_revenue,ratio,liquid_welfare,
//     max_liquid_welfare,max_residual,gap,price_spread,utility_gap,half_rmvup,
//     lw_identity,lw_half,certificate,status,error
//   online: index,n,m,T,online_revenue,offline_revenue,ratio,
//     timewise_margin,buyerwise_margin,quarter_offline,timewise,buyerwise,status,error
//   lower_bound: n,rmvup_revenue,rmfup_revenue,fppe_revenue,rmfup_ratio,
//     expected_ratio,fppe_ratio,status,error
//   concave: index,n,m,kind,eg_revenue,rmvup_inner,rmvup_outer,rho,rho_log,
//     bound,max_kkt,gap,lw_ratio,properties,bound_ok,status,error
//   reduction: index,triplets,optimum_matching,optimum_revenue,
//     identity_revenue,extracted,rho,bound,rounding,identity,size_bound,
//     transfer,status,error
//   monotonicity: index,n,m,min_alpha_change,status,error
// lower_bound ignores the random settings and runs n in {2, 5, 10, 50}.
SuiteReport run_suite(const SuiteConfig& config, SuiteKind kind);

}  // namespace pacing
