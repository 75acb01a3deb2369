// Serial reference path vs OpenMP run-parallel path for the Monte-Carlo
// experiments. Both produce identical results; this measures wall time.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "htlms/harness.hpp"

namespace {

htlms::IdentExperiment ident_config(htlms::Execution exec, std::size_t runs) {
    auto cfg = htlms::IdentExperiment::defaults();
    cfg.options.n_runs = runs;
    cfg.options.execution = exec;
    cfg.options.snapshot_every = 2000;
    return cfg;
}

void BM_IdentSerial(benchmark::State& state) {
    const auto cfg = ident_config(htlms::Execution::Serial, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(htlms::run_ident_experiment(cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_IdentParallel(benchmark::State& state) {
    const auto cfg = ident_config(htlms::Execution::Parallel, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(htlms::run_ident_experiment(cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
    state.counters["threads"] = omp_get_max_threads();
}

void BM_SpectrumSerial(benchmark::State& state) {
    auto cfg = htlms::SpectrumExperiment::defaults();
    cfg.options.n_runs = static_cast<std::size_t>(state.range(0));
    cfg.options.execution = htlms::Execution::Serial;
    for (auto _ : state) benchmark::DoNotOptimize(htlms::run_spectrum_experiment(cfg));
}

void BM_SpectrumParallel(benchmark::State& state) {
    auto cfg = htlms::SpectrumExperiment::defaults();
    cfg.options.n_runs = static_cast<std::size_t>(state.range(0));
    cfg.options.execution = htlms::Execution::Parallel;
    for (auto _ : state) benchmark::DoNotOptimize(htlms::run_spectrum_experiment(cfg));
    state.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(BM_IdentSerial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IdentParallel)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectrumSerial)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectrumParallel)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
