// Serial reference vs OpenMP kernels. Each benchmark takes the execution mode
// as its first argument (0 serial, 1 parallel).

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "sps/matching.hpp"
#include "sps/network.hpp"
#include "sps/simulation.hpp"

namespace {

using namespace sps;

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

// Population and graph after a short warm-up run, shared by the kernels.
const Simulation& warmed(int n) {
  static std::map<int, std::unique_ptr<Simulation>> cache;
  auto& sim = cache[n];
  if (!sim) {
    ScenarioConfig c;
    c.population_size = n;
    c.horizon = 30;
    sim = std::make_unique<Simulation>(c, 1, RunOptions{Execution::serial, 0});
    sim->run_to(30);
  }
  return *sim;
}

void BM_ProposePhase(benchmark::State& state) {
  const Simulation& sim = warmed(static_cast<int>(state.range(1)));
  const MarketView view = make_market_view(sim.population());
  for (auto _ : state) {
    benchmark::DoNotOptimize(propose_phase(sim.population(), view, sim.config().rules, sim.config(),
                                           sim.strategy(), mode(state)));
  }
}
BENCHMARK(BM_ProposePhase)->ArgsProduct({{0, 1}, {1000, 5000}})->Unit(benchmark::kMillisecond);

void BM_Clustering(benchmark::State& state) {
  const MatingGraph g = snapshot(warmed(static_cast<int>(state.range(1))).population());
  for (auto _ : state) benchmark::DoNotOptimize(clustering_coefficient(g, mode(state)));
}
BENCHMARK(BM_Clustering)->ArgsProduct({{0, 1}, {1000, 5000}})->Unit(benchmark::kMicrosecond);

void BM_PathLength(benchmark::State& state) {
  const MatingGraph g = snapshot(warmed(static_cast<int>(state.range(1))).population());
  for (auto _ : state) benchmark::DoNotOptimize(avg_path_length(g, mode(state)));
}
BENCHMARK(BM_PathLength)->ArgsProduct({{0, 1}, {1000, 5000}})->Unit(benchmark::kMillisecond);

void BM_SmallWorldSigma(benchmark::State& state) {
  const MatingGraph g = snapshot(warmed(1000).population());
  for (auto _ : state) benchmark::DoNotOptimize(small_world_sigma(g, 1, 10, mode(state)));
}
BENCHMARK(BM_SmallWorldSigma)->ArgsProduct({{0, 1}})->Unit(benchmark::kMillisecond);

void BM_RunBatch(benchmark::State& state) {
  ScenarioConfig c;
  c.population_size = 500;
  c.horizon = 20;
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4};
  for (auto _ : state) benchmark::DoNotOptimize(run_batch(c, seeds, mode(state)));
}
BENCHMARK(BM_RunBatch)->ArgsProduct({{0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
