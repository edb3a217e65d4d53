#include "pacing/suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "pacing/concave.hpp"
#include "pacing/fppe.hpp"
#include "pacing/online.hpp"
#include "pacing/reduction.hpp"
#include "pacing/rmfup.hpp"
#include "pacing/rmvup.hpp"

namespace pacing {

namespace {

using Row = std::vector<std::string>;

std::string num(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

std::string flag(bool ok) { return ok ? "pass" : "fail"; }

std::string sanitize(std::string text) {
  std::replace_if(text.begin(), text.end(),
                  [](char c) { return c == ',' || c == '\n' || c == '"'; }, ';');
  return text;
}

std::vector<std::string> columns(SuiteKind kind) {
  switch (kind) {
    case SuiteKind::static_markets:
      return {"index", "n", "m", "fppe_revenue", "rmvup_revenue", "ratio",
              "liquid_welfare", "max_liquid_welfare", "max_residual", "gap",
              "price_spread", "utility_gap", "half_rmvup", "lw_identity", "lw_half",
              "certificate", "status", "error"};
    case SuiteKind::online:
      return {"index", "n", "m", "T", "online_revenue", "offline_revenue",
              "ratio", "timewise_margin", "buyerwise_margin", "quarter_offline",
              "timewise", "buyerwise", "status", "error"};
    case SuiteKind::lower_bound:
      return {"n", "rmvup_revenue", "rmfup_revenue", "fppe_revenue",
              "rmfup_ratio", "expected_ratio", "fppe_ratio", "status", "error"};
    case SuiteKind::concave:
      return {"index", "n", "m", "kind", "eg_revenue", "rmvup_inner",
              "rmvup_outer", "rho", "rho_log", "bound", "max_kkt", "gap",
              "lw_ratio", "properties", "bound_ok", "status", "error"};
    case SuiteKind::reduction:
      return {"index", "triplets", "optimum_matching", "optimum_revenue",
              "identity_revenue", "extracted", "rho", "bound", "rounding",
              "identity", "size_bound", "transfer", "status", "error"};
    case SuiteKind::monotonicity:
      return {"index", "n", "m", "min_alpha_change", "status", "error"};
  }
  return {};
}

Row static_row(const SuiteConfig& config, int index) {
  InstanceGenerator gen(config, index);
  const MarketInstance inst = gen.static_instance();
  FppeOptions options;
  options.tol = config.tol;
  const FppeOutcome fppe = solve_fppe(inst, options);
  options.start = FppeStart::perturbed;
  options.seed = static_cast<std::uint64_t>(index) + 1;
  const FppeOutcome second = solve_fppe(inst, options);
  const double spread = (fppe.p - second.p).lpNorm<Eigen::Infinity>();
  const double fppe_rev = fppe.b.sum();
  const double rmvup_rev = solve_rmvup(inst).revenue;
  const double ratio = rmvup_rev > 0.0 ? fppe_rev / rmvup_rev : 1.0;
  const double lw = liquid_welfare(inst, fppe.x);
  const double lw_max = max_liquid_welfare(inst).liquid_welfare;
  double ugap = 0.0;
  for (int i = 0; i < inst.buyers(); ++i) {
    ugap = std::max(ugap, utility_gap(inst, fppe.x, fppe.p, i));
  }
  const bool half_rmvup = ratio >= 0.5 - 1e-6;
  const bool identity = std::abs(fppe_rev - lw) <= 1e-6;
  const bool half = lw >= 0.5 * lw_max - 1e-6;
  const bool cert = max_residual(fppe.residuals) <= config.tol &&
                    spread <= 1e-5 && ugap <= config.tol;
  const bool ok = half_rmvup && identity && half && cert;
  return {std::to_string(index), std::to_string(inst.buyers()),
          std::to_string(inst.goods()), num(fppe_rev), num(rmvup_rev),
          num(ratio), num(lw), num(lw_max), num(max_residual(fppe.residuals)),
          num(fppe.gap), num(spread), num(ugap), flag(half_rmvup), flag(identity),
          flag(half), flag(cert), flag(ok), ""};
}

Row online_row(const SuiteConfig& config, int index) {
  InstanceGenerator gen(config, index);
  const OnlineInstance inst = gen.online_instance();
  FppeOptions options;
  options.tol = config.tol;
  const double online = run_online_fppe(inst, options).revenue;
  const double offline = solve_rmvup(flatten_offline(inst)).revenue;
  const double ratio = offline > 0.0 ? online / offline : 1.0;
  const ComparisonReport cmp = comparison_checks(inst, options);
  const bool quarter_offline = ratio >= 0.25 - 1e-6;
  const bool ok = quarter_offline && cmp.timewise_ok && cmp.buyerwise_ok;
  return {std::to_string(index), std::to_string(inst.buyers()),
          std::to_string(inst.goods()), std::to_string(inst.horizon()),
          num(online), num(offline), num(ratio), num(cmp.timewise_margin),
          num(cmp.buyerwise_margin), flag(quarter_offline), flag(cmp.timewise_ok),
          flag(cmp.buyerwise_ok), flag(ok), ""};
}

Row lower_bound_row(const SuiteConfig& config, int index) {
  static constexpr int kSizes[] = {2, 5, 10, 50};
  const int n = kSizes[index];
  const MarketInstance inst = gen_lower_bound_family(n);
  const double rmvup = solve_rmvup(inst).revenue;
  const double rmfup = solve_rmfup_single_good(inst).revenue;
  FppeOptions options;
  options.tol = config.tol;
  const double fppe = solve_fppe(inst, options).b.sum();
  const double expected = static_cast<double>(n) / (2 * n - 1);
  const double ratio = rmfup / rmvup;
  const bool ok = std::abs(ratio - expected) <= 1e-6 &&
                  std::abs(rmvup - (2 * n - 1)) <= 1e-6;
  return {std::to_string(n), num(rmvup), num(rmfup), num(fppe), num(ratio),
          num(expected), num(fppe / rmvup), flag(ok), ""};
}

Row concave_row(const SuiteConfig& config, int index) {
  InstanceGenerator gen(config, index);
  const ConcaveKind kind =
      index % 2 == 0 ? ConcaveKind::shifted_power : ConcaveKind::piecewise_linear;
  const ConcaveMarket market = gen.concave_market(kind);
  ConcaveOptions options;
  options.tol = config.tol;
  const ConcaveCertificate cert = concave_revenue_certificate(market, options);
  const EgSolution& sol = cert.solution;
  const double max_kkt = *std::max_element(sol.kkt.begin(), sol.kkt.end());
  const ConcavePropertyReport props =
      concave_properties(market, sol, cert.rho, 1e-5);
  const bool props_ok = props.individual_rationality <= 1e-5 &&
                        props.budget <= 1e-5 && props.full_sale <= 1e-5 &&
                        props.unsatisfied_buyers == 0;
  const bool ok = cert.bound_ok && max_kkt <= 1e-5 && props_ok;
  return {std::to_string(index), std::to_string(market.buyers()),
          std::to_string(market.goods()),
          kind == ConcaveKind::shifted_power ? "shifted_power" : "pwl",
          num(cert.eg_revenue), num(cert.rmvup_inner), num(cert.rmvup_outer),
          num(cert.rho), cert.rho_log ? num(*cert.rho_log) : "",
          num(cert.bound), num(max_kkt), num(sol.gap), num(cert.lw_ratio),
          flag(props_ok), flag(cert.bound_ok), flag(ok), ""};
}

Row reduction_row(const SuiteConfig& config, int index) {
  InstanceGenerator gen(config, index);
  const int triplets = 2 * (1 + index % 6);
  const ThreeDTwoMatching tdm = gen.three_d_two_matching(triplets);
  const double rho = index % 2 == 0 ? 1.0 : 0.85 + 0.15 * std::generate_canonical<double, 53>(gen.engine());
  const TransferReport report = approximation_transfer_check(tdm, rho);
  const MarketInstance market = to_rmfup_instance(tdm);
  const Outcome input = gen.random_priced_solution(market);
  const Outcome rounded = round_solution(market, input);
  const bool rounding = revenue(rounded) >= revenue(input) - 1e-9 &&
                        normal_form_defect(market, rounded).empty();
  const bool ok = rounding && report.identity_ok && report.size_bound_ok &&
                  report.transfer_ok && tdm.exactly_two();
  return {std::to_string(index), std::to_string(report.triplets),
          std::to_string(report.optimum_matching), num(report.optimum_revenue),
          num(report.identity_revenue), std::to_string(report.extracted),
          num(report.rho), num(report.bound), flag(rounding),
          flag(report.identity_ok), flag(report.size_bound_ok),
          flag(report.transfer_ok), flag(ok), ""};
}

Row monotonicity_row(const SuiteConfig& config, int index) {
  InstanceGenerator gen(config, index);
  const MarketInstance inst = gen.static_instance();
  const Vector increase = gen.budget_increase(inst.buyers());
  FppeOptions options;
  options.tol = config.tol;
  const Vector before = solve_fppe(inst, options).alpha;
  const Vector after =
      solve_fppe(inst.with_budgets(inst.budgets() + increase), options).alpha;
  const double change = (after - before).minCoeff();
  return {std::to_string(index), std::to_string(inst.buyers()),
          std::to_string(inst.goods()), num(change),
          flag(change >= -10.0 * config.tol), ""};
}

}  // namespace

std::string to_string(SuiteKind kind) {
  switch (kind) {
    case SuiteKind::static_markets: return "static";
    case SuiteKind::online: return "online";
    case SuiteKind::lower_bound: return "lower-bound";
    case SuiteKind::concave: return "concave";
    case SuiteKind::reduction: return "reduction";
    case SuiteKind::monotonicity: return "monotonicity";
  }
  return "unknown";
}

SuiteKind parse_suite_kind(const std::string& name) {
  for (SuiteKind kind : {SuiteKind::static_markets, SuiteKind::online,
                         SuiteKind::lower_bound, SuiteKind::concave,
                         SuiteKind::reduction, SuiteKind::monotonicity}) {
    if (to_string(kind) == name) return kind;
  }
  throw StructuralError("unknown suite \"" + name + "\"");
}

std::string SuiteReport::csv(bool with_header) const {
  std::ostringstream out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
    out << '\n';
  };
  if (with_header) line(header);
  for (const auto& row : rows) line(row);
  return out.str();
}

SuiteReport run_suite(const SuiteConfig& config, SuiteKind kind) {
  std::function<Row(const SuiteConfig&, int)> make;
  int count = config.count;
  switch (kind) {
    case SuiteKind::static_markets: make = static_row; break;
    case SuiteKind::online: make = online_row; break;
    case SuiteKind::lower_bound: make = lower_bound_row; count = 4; break;
    case SuiteKind::concave: make = concave_row; break;
    case SuiteKind::reduction: make = reduction_row; break;
    case SuiteKind::monotonicity: make = monotonicity_row; break;
  }
  SuiteReport report{kind, columns(kind), std::vector<Row>(std::max(count, 0)), 0};
  report.header.push_back("runtime_ms");
  const std::size_t width = report.header.size();

  std::atomic<int> next{0};
  std::mutex writer;
  auto worker = [&] {
    for (int k = next++; k < count; k = next++) {
      const auto start = std::chrono::steady_clock::now();
      Row row;
      try {
        row = make(config, k);
      } catch (const std::exception& e) {
        row.assign(width - 1, "");
        row[0] = std::to_string(k);
        row[width - 3] = "error";
        row[width - 2] = sanitize(e.what());
      }
      const auto elapsed = std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - start);
      row.push_back(num(std::round(elapsed.count() * 1000.0) / 1000.0));
      std::lock_guard<std::mutex> lock(writer);
      report.rows[k] = std::move(row);
    }
  };
  const int threads = std::max(1, std::min(config.threads, count));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& row : report.rows) {
    if (row[width - 3] != "pass") ++report.failures;
  }
  return report;
}

}  // namespace pacing
