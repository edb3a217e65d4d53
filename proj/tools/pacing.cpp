#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pacing/concave.hpp"
#include "pacing/fppe.hpp"
#include "pacing/generators.hpp"
#include "pacing/io.hpp"
#include "pacing/online.hpp"
#include "pacing/reduction.hpp"
#include "pacing/rmfup.hpp"
#include "pacing/rmvup.hpp"
#include "pacing/suite.hpp"

namespace {

using namespace pacing;
using nlohmann::json;

// Exit codes: 0 every assertion passed, 1 an assertion failed,
// 2 bad input or a solver error.
constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kError = 2;

struct Globals {
  double tol = kEquilibriumTol;
  std::uint64_t seed = 0;
  std::string out = "-";
};

void emit(const Globals& g, const std::string& text) {
  const std::string line = text.empty() || text.back() == '\n' ? text : text + "\n";
  if (g.out == "-") {
    std::cout << line;
  } else {
    write_text(g.out, line);
  }
}

int verdict(bool ok, const std::string& what) {
  if (!ok) std::cerr << "FAIL: " << what << "\n";
  return ok ? kPass : kFail;
}

json to_json(const Vector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) rows.push_back(to_json(Vector(m.row(r).transpose())));
  return rows;
}

std::vector<std::vector<double>> read_candidates(const std::string& path) {
  const json doc = json::parse(read_text(path));
  if (!doc.is_array()) throw FormatError("candidate file must be an array of arrays");
  std::vector<std::vector<double>> out;
  for (const auto& good : doc) {
    if (!good.is_array()) throw FormatError("candidate file must be an array of arrays");
    out.push_back(good.get<std::vector<double>>());
  }
  return out;
}

FppeOptions fppe_options(const Globals& g) {
  FppeOptions options;
  options.tol = g.tol;
  options.seed = g.seed;
  return options;
}

// solve fppe|rmvup|rmfup|concave

int solve_fppe_cmd(const Globals& g, const std::string& path, bool perturbed) {
  const MarketInstance instance = parse_instance(read_text(path));
  FppeOptions options = fppe_options(g);
  if (perturbed) options.start = FppeStart::perturbed;
  const FppeOutcome fppe = solve_fppe(instance, options);
  emit(g, dump_fppe(fppe));
  std::cerr << "revenue " << fppe.b.sum() << " max_residual "
            << max_residual(fppe.residuals) << " gap " << fppe.gap << "\n";
  return kPass;
}

int solve_rmvup_cmd(const Globals& g, const std::string& path) {
  const MarketInstance instance = parse_instance(read_text(path));
  const RmvupResult result = solve_rmvup(instance);
  emit(g, dump_outcome(result.outcome));
  std::cerr << "revenue " << result.revenue << "\n";
  const FeasibilityReport report =
      validate(instance, result.outcome, PricingMode::variable, g.tol);
  return verdict(report.feasible(), "RMVUP outcome violates its constraints");
}

int solve_rmfup_cmd(const Globals& g, const std::string& path, bool exact_single,
                    const std::string& candidates, double grid, int threads) {
  const MarketInstance instance = parse_instance(read_text(path));
  FixedPriceResult result;
  if (exact_single) {
    result = solve_rmfup_single_good(instance);
  } else if (!candidates.empty()) {
    result = solve_rmfup_enumerate(instance, read_candidates(candidates),
                                   kEnumerationCap, threads);
  } else if (grid > 0.0) {
    result = solve_rmfup_heuristic(instance, grid);
  } else if (instance.goods() == 1) {
    result = solve_rmfup_single_good(instance);
  } else {
    result = solve_rmfup_heuristic(instance);
  }
  emit(g, dump_outcome(result.outcome));
  std::cerr << "revenue " << result.revenue << "\n";
  const FeasibilityReport report =
      validate(instance, result.outcome, PricingMode::fixed, g.tol);
  return verdict(report.feasible(), "fixed-price outcome violates its constraints");
}

int solve_concave_cmd(const Globals& g, const std::string& path, bool certify) {
  const ConcaveMarket market = parse_concave_market(read_text(path));
  ConcaveOptions options;
  options.tol = g.tol;
  options.seed = g.seed;
  const EgSolution sol = solve_concave_eg(market, options);
  json doc{{"x", to_json(sol.x)},
           {"b", to_json(sol.payments)},
           {"p", to_json(sol.p)},
           {"alpha", to_json(sol.alpha)},
           {"u", to_json(sol.u)},
           {"delta", to_json(sol.delta)},
           {"gap", sol.gap},
           {"kkt", std::vector<double>(sol.kkt.begin(), sol.kkt.end())}};
  int status = kPass;
  if (certify) {
    try {
      const ConcaveCertificate cert = concave_revenue_certificate(market, options);
      doc["certificate"] = {{"eg_revenue", cert.eg_revenue},
                            {"rmvup_inner", cert.rmvup_inner},
                            {"rmvup_outer", cert.rmvup_outer},
                            {"rho", cert.rho},
                            {"bound", cert.bound},
                            {"liquid_welfare", cert.liquid_welfare},
                            {"max_liquid_welfare", cert.max_liquid_welfare}};
      if (cert.rho_log) doc["certificate"]["rho_log"] = *cert.rho_log;
    } catch (const CertificateError& e) {
      std::cerr << "FAIL: " << e.what() << "\n";
      status = kFail;
    }
  }
  emit(g, doc.dump());
  return status;
}

// simulate online

int simulate_online_cmd(const Globals& g, const std::string& path,
                        bool diagnostics) {
  const OnlineInstance instance = parse_online_instance(read_text(path));
  const FppeOptions options = fppe_options(g);
  const OnlineTrace trace = run_online_fppe(instance, options);
  emit(g, trace_csv(trace));
  const double offline = solve_rmvup(flatten_offline(instance)).revenue;
  const double ratio = offline > 0.0 ? trace.revenue / offline : 1.0;
  std::cerr << "online " << trace.revenue << " offline " << offline
            << " ratio " << ratio << "\n";
  int status = verdict(ratio >= 0.25 - 1e-6, "competitive ratio below 1/4");
  if (diagnostics) {
    const ComparisonReport report = comparison_checks(instance, options);
    std::cerr << "timewise_margin " << report.timewise_margin
              << " buyerwise_margin " << report.buyerwise_margin << "\n";
    for (const auto& v : report.violations) std::cerr << "violation: " << v << "\n";
    if (!report.timewise_ok || !report.buyerwise_ok) status = kFail;
  }
  return status;
}

// Reduction commands.

int reduce_cmd(const Globals& g, const std::string& path) {
  const ThreeDTwoMatching tdm = parse_3d2m(read_text(path));
  emit(g, dump_instance(to_rmfup_instance(tdm)));
  return kPass;
}

int round_cmd(const Globals& g, const std::string& instance_path,
              const std::string& solution_path) {
  const MarketInstance market = parse_instance(read_text(instance_path));
  const Outcome solution = parse_outcome(read_text(solution_path));
  const Outcome rounded = round_solution(market, solution);
  emit(g, dump_outcome(rounded));
  const double before = revenue(solution);
  const double after = revenue(rounded);
  std::cerr << "revenue " << before << " -> " << after << "\n";
  const std::string defect = normal_form_defect(market, rounded);
  int status = verdict(after >= before - 1e-9, "rounding lost revenue");
  if (!defect.empty()) status = verdict(false, defect);
  return status;
}

int extract_cmd(const Globals& g, const std::string& instance_path,
                const std::string& solution_path, const std::string& tdm_path) {
  const MarketInstance market = parse_instance(read_text(instance_path));
  Outcome solution = parse_outcome(read_text(solution_path));
  if (!normal_form_defect(market, solution).empty()) {
    solution = round_solution(market, solution);
  }
  const std::vector<int> matching = extract_matching(market, solution);
  json doc{{"matching", matching}, {"size", matching.size()}};
  if (!tdm_path.empty()) {
    const ThreeDTwoMatching tdm = parse_3d2m(read_text(tdm_path));
    json named = json::array();
    for (int s : matching) {
      const auto& t = tdm.triplets().at(s);
      named.push_back({tdm.set(0)[t[0]], tdm.set(1)[t[1]], tdm.set(2)[t[2]]});
    }
    doc["triplets"] = named;
  }
  emit(g, doc.dump());
  return kPass;
}

int check_transfer_cmd(const Globals& g, const std::string& path, double rho) {
  const ThreeDTwoMatching tdm = parse_3d2m(read_text(path));
  const TransferReport r = approximation_transfer_check(tdm, rho);
  const json doc{{"triplets", r.triplets},
                 {"optimum_matching", r.optimum_matching},
                 {"extracted", r.extracted},
                 {"optimum_revenue", r.optimum_revenue},
                 {"identity_revenue", r.identity_revenue},
                 {"chosen_revenue", r.chosen_revenue},
                 {"rounded_revenue", r.rounded_revenue},
                 {"rho", r.rho},
                 {"bound", r.bound},
                 {"identity_ok", r.identity_ok},
                 {"size_bound_ok", r.size_bound_ok},
                 {"transfer_ok", r.transfer_ok}};
  emit(g, doc.dump());
  return verdict(r.identity_ok && r.size_bound_ok && r.transfer_ok,
                 "approximation transfer check");
}

// gen

int gen_random_cmd(const Globals& g, const std::string& kind, int buyers,
                   int goods, int rounds, int triplets) {
  SuiteConfig config;
  config.seed = g.seed;
  if (buyers > 0) config.min_buyers = config.max_buyers = buyers;
  if (goods > 0) config.min_goods = config.max_goods = goods;
  if (rounds > 0) config.min_rounds = config.max_rounds = rounds;
  InstanceGenerator gen(config);
  if (kind == "static") {
    emit(g, dump_instance(gen.static_instance()));
  } else if (kind == "online") {
    emit(g, dump_online_instance(gen.online_instance()));
  } else if (kind == "concave") {
    emit(g, dump_concave_market(gen.concave_market(ConcaveKind::mixed)));
  } else if (kind == "3d2m") {
    emit(g, dump_3d2m(gen.three_d_two_matching(triplets)));
  } else {
    throw CLI::ValidationError("--kind", "unknown kind " + kind);
  }
  return kPass;
}

// suite run

int suite_cmd(const Globals& g, const std::vector<std::string>& kinds, int count,
              int threads) {
  std::vector<SuiteKind> selected;
  if (kinds.empty() || (kinds.size() == 1 && kinds.front() == "all")) {
    selected = {SuiteKind::static_markets, SuiteKind::online,
                SuiteKind::lower_bound,    SuiteKind::concave,
                SuiteKind::reduction,      SuiteKind::monotonicity};
  } else {
    for (const auto& k : kinds) selected.push_back(parse_suite_kind(k));
  }
  if (g.out != "-") std::filesystem::create_directories(g.out);
  int failures = 0;
  for (SuiteKind kind : selected) {
    SuiteConfig config;
    config.seed = g.seed;
    config.tol = g.tol;
    config.count = count;
    config.threads = threads;
    if (kind == SuiteKind::online) {
      config.max_buyers = 5;
      config.max_goods = 3;
    } else if (kind == SuiteKind::concave) {
      config.max_buyers = 4;
      config.max_goods = 4;
    }
    const SuiteReport report = run_suite(config, kind);
    failures += report.failures;
    std::cerr << to_string(kind) << ": " << report.rows.size() << " rows, "
              << report.failures << " failures\n";
    if (g.out == "-") {
      std::cout << report.csv();
    } else {
      const std::filesystem::path file =
          std::filesystem::path(g.out) / (to_string(kind) + ".csv");
      const bool fresh = !std::filesystem::exists(file);
      std::ofstream out(file, std::ios::app);
      if (!out) throw FormatError("cannot write " + file.string());
      out << report.csv(fresh);
    }
  }
  return failures == 0 ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pacing equilibria, revenue benchmarks and the 3D-2-matching reduction"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--tol", g.tol, "Equilibrium and feasibility tolerance")
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for generators and perturbed starts")
      ->capture_default_str();
  app.add_option("--out", g.out, "Output file, or directory for suite run ('-' = stdout)")
      ->capture_default_str();

  int status = kPass;

  auto* solve = app.add_subcommand("solve", "Solve a market");
  solve->require_subcommand(1);
  std::string instance_path;
  bool perturbed = false;
  auto* fppe = solve->add_subcommand("fppe", "First-price pacing equilibrium");
  fppe->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
  fppe->add_flag("--perturbed", perturbed, "Start from a seeded random interior point");
  fppe->callback([&] { status = solve_fppe_cmd(g, instance_path, perturbed); });

  auto* rmvup = solve->add_subcommand("rmvup", "Variable unit price revenue LP");
  rmvup->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
  rmvup->callback([&] { status = solve_rmvup_cmd(g, instance_path); });

  bool exact_single = false;
  std::string candidates;
  double grid = 0.0;
  int threads = 1;
  auto* rmfup = solve->add_subcommand("rmfup", "Fixed unit price revenue");
  rmfup->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
  auto* exact_opt = rmfup->add_flag("--exact-single", exact_single,
                                    "Exact optimum for a single good");
  auto* enum_opt = rmfup->add_option("--enumerate", candidates,
                                     "JSON file with one candidate price list per good")
                       ->check(CLI::ExistingFile);
  auto* grid_opt = rmfup->add_option("--grid", grid, "Local search step")
                       ->check(CLI::PositiveNumber);
  exact_opt->excludes(enum_opt)->excludes(grid_opt);
  enum_opt->excludes(grid_opt);
  rmfup->add_option("--threads", threads, "Enumeration threads")->check(CLI::PositiveNumber);
  rmfup->callback([&] {
    status = solve_rmfup_cmd(g, instance_path, exact_single, candidates, grid, threads);
  });

  bool certify = false;
  auto* concave = solve->add_subcommand("concave", "Eisenberg-Gale with concave valuations");
  concave->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
  concave->add_flag("--certify", certify, "Also check the revenue bound");
  concave->callback([&] { status = solve_concave_cmd(g, instance_path, certify); });

  auto* simulate = app.add_subcommand("simulate", "Run an online mechanism");
  simulate->require_subcommand(1);
  bool diagnostics = false;
  auto* online = simulate->add_subcommand("online", "Per-round FPPE with carried budgets");
  online->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
  online->add_flag("--diagnostics", diagnostics,
                   "Check the intermediate-solution inequalities");
  online->callback([&] { status = simulate_online_cmd(g, instance_path, diagnostics); });

  auto* reduce = app.add_subcommand("reduce", "Build reduced markets");
  reduce->require_subcommand(1);
  std::string in_path;
  auto* reduce3 = reduce->add_subcommand("3d2m", "3D-2-matching to a fixed-price market");
  reduce3->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
  reduce3->callback([&] { status = reduce_cmd(g, in_path); });

  std::string solution_path;
  auto* round = app.add_subcommand("round", "Round a fixed-price solution of a reduced market");
  round->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
  round->add_option("--solution", solution_path)->required()->check(CLI::ExistingFile);
  round->callback([&] { status = round_cmd(g, instance_path, solution_path); });

  std::string tdm_path;
  auto* extract = app.add_subcommand("extract-matching",
                                     "Matching from a (rounded) solution");
  extract->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
  extract->add_option("--solution", solution_path)->required()->check(CLI::ExistingFile);
  extract->add_option("--3d2m", tdm_path, "Source instance, to report triplet names")
      ->check(CLI::ExistingFile);
  extract->callback([&] { status = extract_cmd(g, instance_path, solution_path, tdm_path); });

  double rho = 1.0;
  auto* transfer = app.add_subcommand("check-transfer",
                                      "Approximation transfer on a 3D-2-matching");
  transfer->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
  transfer->add_option("--rho", rho)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  transfer->callback([&] { status = check_transfer_cmd(g, in_path, rho); });

  auto* gen = app.add_subcommand("gen", "Generate instances");
  gen->require_subcommand(1);
  int n = 2;
  auto* lower = gen->add_subcommand("lower-bound", "Tightness family");
  lower->add_option("--n", n)->check(CLI::Range(2, 1000000))->capture_default_str();
  lower->callback([&] { emit(g, dump_instance(gen_lower_bound_family(n))); });

  std::string branch = "arrival";
  auto* adversarial = gen->add_subcommand("adversarial", "Two-round online adversary");
  adversarial->add_option("--branch", branch)
      ->check(CLI::IsMember({"arrival", "no-arrival"}))
      ->capture_default_str();
  adversarial->callback([&] {
    const AdversaryBranch b = adversarial_instance(branch == "arrival" ? 0.0 : 1.0);
    emit(g, dump_online_instance(b.instance));
  });

  std::string kind = "static";
  int buyers = 0, goods = 0, rounds = 0, triplets = 4;
  auto* random = gen->add_subcommand("random", "Random instance from the suite distributions");
  random->add_option("--kind", kind)
      ->check(CLI::IsMember({"static", "online", "concave", "3d2m"}))
      ->capture_default_str();
  random->add_option("--buyers", buyers);
  random->add_option("--goods", goods);
  random->add_option("--rounds", rounds);
  random->add_option("--triplets", triplets)->capture_default_str();
  random->callback([&] { status = gen_random_cmd(g, kind, buyers, goods, rounds, triplets); });

  auto* suite = app.add_subcommand("suite", "Experiment suites");
  suite->require_subcommand(1);
  std::vector<std::string> kinds;
  int count = 200;
  auto* run = suite->add_subcommand("run", "Run suites and write CSV reports");
  run->add_option("--kind", kinds, "static, online, lower-bound, concave, reduction, "
                                   "monotonicity or all");
  run->add_option("--count", count)->check(CLI::PositiveNumber)->capture_default_str();
  run->add_option("--threads", threads)->check(CLI::PositiveNumber);
  run->callback([&] { status = suite_cmd(g, kinds, count, threads); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const CertificateError& e) {
    std::cerr << "FAIL: " << e.what() << "\n";
    return kFail;
  } catch (const ConvergenceError& e) {
    std::cerr << "FAIL: " << e.what() << "\n";
    return kFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return status;
}
