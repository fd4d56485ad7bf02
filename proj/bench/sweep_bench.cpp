// Compares the serial reference sweep with the OpenMP sweep on a small
// policy-by-seed grid. Both produce identical rows; only wall clock differs.

#include <benchmark/benchmark.h>

#include <filesystem>
#include <omp.h>

#include "olapsim/sweep.hpp"

namespace {

using namespace olapsim;

std::vector<SweepCase> grid(double end_time) {
    ScenarioConfig base;
    base.run.scenario_id = "bench";
    base.run.end_time = end_time;
    base.run.output_dir = (std::filesystem::temp_directory_path() / "olapsim_bench").string();
    const std::vector<SweepAxis> axes = {
        parse_axis("routing.policy=flow_weighted|round_robin|least_outstanding|response_time_weighted"),
        parse_axis("run.seed=1|2"),
    };
    return expand(base, axes);
}

SweepOptions options(int threads) {
    SweepOptions o;
    o.threads = threads;
    o.run.write_outputs = false;
    o.run.write_svg = false;
    return o;
}

void BM_SweepSerial(benchmark::State& state) {
    const auto cases = grid(static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(run_sweep_serial(cases, options(1)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cases.size()));
}

void BM_SweepOpenMP(benchmark::State& state) {
    const auto cases = grid(static_cast<double>(state.range(0)));
    const int threads = omp_get_max_threads();
    for (auto _ : state) benchmark::DoNotOptimize(run_sweep(cases, options(threads)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cases.size()));
    state.counters["threads"] = threads;
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(120)->Arg(600)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepOpenMP)->Arg(120)->Arg(600)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
