// Serial reference vs OpenMP kernel for the hot paths.

#include <benchmark/benchmark.h>

#include <map>

#include "bntune/bayes_net.hpp"
#include "bntune/learn.hpp"
#include "bntune/tune.hpp"

using namespace bntune;

namespace {

const CategoricalDataset& data(std::size_t nodes, std::size_t rows) {
  static std::map<std::pair<std::size_t, std::size_t>, CategoricalDataset> cache;
  auto key = std::make_pair(nodes, rows);
  auto it = cache.find(key);
  if (it == cache.end()) {
    RandomNetworkOptions o;
    o.nodes = nodes;
    o.max_states = 4;
    o.density = 1.5;
    o.sharpness = 2.0;
    o.seed = 42;
    it = cache.emplace(key, forward_sample(random_bayes_net(o), rows, 7)).first;
  }
  return it->second;
}

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

void BM_HillClimb(benchmark::State& state) {
  const auto& d = data(static_cast<std::size_t>(state.range(1)), 5000);
  HillClimbOptions o;
  o.execution = mode(state);
  for (auto _ : state) {
    LocalScoreCache cache;
    o.cache = &cache;
    benchmark::DoNotOptimize(hill_climb(d, ScoreSpec::bic(), std::nullopt, 0, o));
  }
}
BENCHMARK(BM_HillClimb)->ArgNames({"parallel", "nodes"})->ArgsProduct({{0, 1}, {10, 20}})->Unit(benchmark::kMillisecond);

void BM_Otsl(benchmark::State& state) {
  const auto& d = data(8, 2000);
  ConfigGrid grid = ConfigGrid::standard(Algorithm::HillClimbing, TuningScore::EbicNormalised);
  grid.gammas = {0, 1, 2, 4, 8};
  TuneOptions o;
  o.folds = 4;
  o.seed = 1;
  o.execution = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(otsl(d, grid, o));
}
BENCHMARK(BM_Otsl)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_InsampleSelect(benchmark::State& state) {
  const auto& d = data(8, 2000);
  ConfigGrid grid = ConfigGrid::standard(Algorithm::Mmhc, TuningScore::Bdeu);
  grid.isses = {1, 5, 10};
  for (auto _ : state)
    benchmark::DoNotOptimize(insample_select(d, grid, SelectionCriterion::Bic, 1, mode(state)));
}
BENCHMARK(BM_InsampleSelect)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
