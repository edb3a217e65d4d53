#include <benchmark/benchmark.h>

#include "pacing/concave.hpp"
#include "pacing/fppe.hpp"
#include "pacing/generators.hpp"
#include "pacing/online.hpp"
#include "pacing/rmfup.hpp"
#include "pacing/rmvup.hpp"

namespace {

using namespace pacing;

MarketInstance square_market(int size) {
  SuiteConfig config;
  config.seed = 1;
  config.min_buyers = config.max_buyers = size;
  config.min_goods = config.max_goods = size;
  InstanceGenerator gen(config, static_cast<std::uint64_t>(size));
  return gen.static_instance();
}

void BM_Fppe(benchmark::State& state) {
  const MarketInstance m = square_market(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_fppe(m).p);
}
BENCHMARK(BM_Fppe)->Arg(4)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_RmvupLp(benchmark::State& state) {
  const MarketInstance m = square_market(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_rmvup(m).revenue);
}
BENCHMARK(BM_RmvupLp)->Arg(4)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_OnlineSimulation(benchmark::State& state) {
  SuiteConfig config;
  config.seed = 2;
  config.min_buyers = config.max_buyers = 8;
  config.min_goods = config.max_goods = 4;
  config.min_rounds = config.max_rounds = static_cast<int>(state.range(0));
  InstanceGenerator gen(config, 0);
  const OnlineInstance inst = gen.online_instance();
  for (auto _ : state) benchmark::DoNotOptimize(run_online_fppe(inst).revenue);
}
BENCHMARK(BM_OnlineSimulation)->Arg(2)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_ConcaveEg(benchmark::State& state) {
  SuiteConfig config;
  config.seed = 3;
  config.min_buyers = config.max_buyers = static_cast<int>(state.range(0));
  config.min_goods = config.max_goods = static_cast<int>(state.range(0));
  InstanceGenerator gen(config, 0);
  const ConcaveMarket market = gen.concave_market(ConcaveKind::mixed);
  for (auto _ : state) benchmark::DoNotOptimize(solve_concave_eg(market).p);
}
BENCHMARK(BM_ConcaveEg)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_ConcaveBracket(benchmark::State& state) {
  SuiteConfig config;
  config.seed = 4;
  config.min_buyers = config.max_buyers = 4;
  config.min_goods = config.max_goods = 4;
  InstanceGenerator gen(config, 0);
  const ConcaveMarket market = gen.concave_market(ConcaveKind::shifted_power);
  const int segments = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rmvup_concave(market, segments).outer);
}
BENCHMARK(BM_ConcaveBracket)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_RmfupEnumeration(benchmark::State& state) {
  const int goods = static_cast<int>(state.range(0));
  const MarketInstance m = [&] {
    SuiteConfig config;
    config.seed = 5;
    config.min_buyers = config.max_buyers = 6;
    config.min_goods = config.max_goods = goods;
    InstanceGenerator gen(config, 0);
    return gen.static_instance();
  }();
  const std::vector<std::vector<double>> cands(goods, {0.1, 0.3, 0.5, 0.7, 0.9});
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_rmfup_enumerate(m, cands, kEnumerationCap,
                                                   static_cast<int>(state.range(1))).revenue);
  }
}
BENCHMARK(BM_RmfupEnumeration)->Args({4, 1})->Args({6, 1})->Args({6, 2})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
