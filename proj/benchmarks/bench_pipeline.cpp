#include <benchmark/benchmark.h>

#include <filesystem>

#include "coopdea/alloc.hpp"
#include "coopdea/cli/cli.hpp"
#include "coopdea/dea.hpp"
#include "coopdea/game.hpp"
#include "coopdea/solvers.hpp"

namespace {

using namespace coopdea;

const std::filesystem::path kData = COOPDEA_DATA_DIR;

const dea::DmuPanel& numerical() {
  static const auto panel = cli::load_panel(kData / "numerical_example.csv", {3, 1, 2});
  return panel;
}

const dea::DmuPanel& bank() {
  static const auto panel = cli::load_panel(kData / "bank_branches.csv", {3, 2, 2});
  return panel;
}

dea::CrossEfficiencyMatrix cem_of(const dea::DmuPanel& panel, std::size_t threads = 1) {
  dea::DeaOptions options;
  options.threads = threads;
  return dea::build_cem(dea::split_to_subdmus(dea::normalize_panel(panel)), options);
}

void BM_CemNumerical(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(cem_of(numerical()));
}
BENCHMARK(BM_CemNumerical)->Unit(benchmark::kMillisecond);

void BM_CemBank(benchmark::State& state) {
  const auto threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cem_of(bank(), threads));
}
BENCHMARK(BM_CemBank)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ShapleyDirect(benchmark::State& state) {
  const auto cem = cem_of(numerical());
  for (auto _ : state) {
    benchmark::DoNotOptimize(alloc::direct_allocation(cem, 100.0, solvers::SolutionConcept::kShapley));
  }
}
BENCHMARK(BM_ShapleyDirect)->Unit(benchmark::kMillisecond);

void BM_NucleolusDirect(benchmark::State& state) {
  const auto cem = cem_of(numerical());
  for (auto _ : state) {
    benchmark::DoNotOptimize(alloc::direct_allocation(cem, 100.0, solvers::SolutionConcept::kNucleolus));
  }
}
BENCHMARK(BM_NucleolusDirect)->Unit(benchmark::kMillisecond);

// Stage game of the first k bank branches.
void BM_NucleolusBankStage(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto stage = dea::stage_submatrix(cem_of(bank()), dea::Stage::kFirst);
  const dea::CrossEfficiencyMatrix sub(stage.values().topLeftCorner(k, k),
                                       {stage.labels().begin(), stage.labels().begin() + k},
                                       {stage.stages().begin(), stage.stages().begin() + k});
  const auto g = game::make_cree_game(sub, 500.0);
  for (auto _ : state) benchmark::DoNotOptimize(solvers::nucleolus(g));
}
BENCHMARK(BM_NucleolusBankStage)->DenseRange(9, 17, 4)->Unit(benchmark::kMillisecond);

void BM_SecondaryNucleolusBank(benchmark::State& state) {
  const auto cem = cem_of(bank());
  for (auto _ : state) {
    benchmark::DoNotOptimize(alloc::secondary_allocation(cem, 1000.0, solvers::SolutionConcept::kNucleolus));
  }
}
BENCHMARK(BM_SecondaryNucleolusBank)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
