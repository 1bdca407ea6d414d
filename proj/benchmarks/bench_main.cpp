#include <benchmark/benchmark.h>

#include "ktsim/experimenting.hpp"
#include "ktsim/ground_truth.hpp"
#include "ktsim/mining.hpp"
#include "ktsim/orchestrator.hpp"

namespace {

using namespace ktsim;

ExperimentDesign wide_design(std::size_t width, std::size_t n) {
  ExperimentDesign d;
  for (std::uint32_t v = 0; v < width; ++v) d.measured.push_back(VariableId{v});
  d.noise_rate = 0.1;
  d.samples = n;
  d.selection = SelectionCondition{VariableId{0}, 1};
  return d;
}

void BM_SampleDataset(benchmark::State& state) {
  SeedStream rng(1);
  const GroundTruth gt = build_ground_truth(30, 3, 0.9, rng);
  const auto design = wide_design(8, static_cast<std::size_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_dataset(gt, design, TeamId{}, seed++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleDataset)->Arg(5000)->Arg(100000);

void BM_Mine(benchmark::State& state) {
  SeedStream rng(2);
  const GroundTruth gt = build_ground_truth(30, 3, 0.9, rng);
  const auto s = sample_dataset(gt, wide_design(static_cast<std::size_t>(state.range(0)), 5000), TeamId{}, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mine(s.dataset, TeamId{}, TeamId{Role::Mining, 0}, {}, s.datasheet, {}, MiningParams{}));
  }
}
BENCHMARK(BM_Mine)->Arg(8)->Arg(30);

void BM_Run(benchmark::State& state) {
  ScenarioConfig cfg;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run(cfg, seed++));
}
BENCHMARK(BM_Run)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
