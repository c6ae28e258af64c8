// Serial vs OpenMP trial runner on a fixed footnote-2 workload.
#include <benchmark/benchmark.h>

#include "mepf/experiment.hpp"

namespace {

mepf::ExperimentConfig workload() {
  return mepf::ExperimentConfig::parse("dist=footnote2:64\ntrials=64\nseed=5\ndelta=0.1\n"
                                       "algorithms=truncated,adaptive,set_elimination\n");
}

void BM_TrialsSerial(benchmark::State& state) {
  const mepf::ExperimentConfig config = workload();
  for (auto _ : state) benchmark::DoNotOptimize(mepf::run_trials_serial(config));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.trials));
}
BENCHMARK(BM_TrialsSerial)->Unit(benchmark::kMillisecond);

void BM_TrialsParallel(benchmark::State& state) {
  const mepf::ExperimentConfig config = workload();
  const auto jobs = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mepf::run_trials_parallel(config, jobs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.trials));
}
BENCHMARK(BM_TrialsParallel)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
