#include <filesystem>
#include <string>
#include <unistd.h>

#include <benchmark/benchmark.h>

#include "citefair/fairness.hpp"
#include "citefair/indicators.hpp"
#include "citefair/ingest.hpp"
#include "citefair/stats.hpp"
#include "citefair/synth.hpp"

namespace {

using namespace citefair;

const Dataset& paper2010() {
  static const Dataset ds = synth::generate(synth::paper2010_profile());
  return ds;
}

void BM_HypergeomCi(benchmark::State& state) {
  const stats::HypergeomParams p{3695, state.range(0), 369};
  for (auto _ : state) benchmark::DoNotOptimize(stats::hypergeom_ci(p, 0.90));
}
BENCHMARK(BM_HypergeomCi)->Arg(31)->Arg(173)->Arg(532);

void BM_ComputeTable(benchmark::State& state) {
  const auto& ds = paper2010();
  const IndicatorSpec spec{IndicatorKind::impact_factor, state.range(0) == 2 ? Window::two : Window::five,
                           Counting::fractional};
  for (auto _ : state) benchmark::DoNotOptimize(compute_table(ds, spec));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * ds.events.size()));
}
BENCHMARK(BM_ComputeTable)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_FairnessTest(benchmark::State& state) {
  const auto& ds = paper2010();
  const auto part = Partition::from_dataset(ds);
  const auto table = rescale(compute_table(ds, {}), part);
  for (auto _ : state) benchmark::DoNotOptimize(fairness_test(table, part, 10, 0.90));
}
BENCHMARK(BM_FairnessTest)->Unit(benchmark::kMillisecond);

void BM_Spearman(benchmark::State& state) {
  const auto& ds = paper2010();
  const auto a = compute_table(ds, {});
  const auto b = compute_table(ds, {IndicatorKind::impact_factor, Window::five, Counting::fractional});
  for (auto _ : state) benchmark::DoNotOptimize(stats::spearman(a, b));
}
BENCHMARK(BM_Spearman)->Unit(benchmark::kMicrosecond);

void BM_IngestCitations(benchmark::State& state) {
  const auto dir = std::filesystem::temp_directory_path() / ("citefair-bench-" + std::to_string(::getpid()));
  write_dataset(paper2010(), dir);
  for (auto _ : state) benchmark::DoNotOptimize(ingest_files(InputPaths::in_directory(dir), IngestConfig{}));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * paper2010().events.size()));
  std::filesystem::remove_all(dir);
}
BENCHMARK(BM_IngestCitations)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
