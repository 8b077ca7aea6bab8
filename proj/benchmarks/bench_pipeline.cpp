#include <benchmark/benchmark.h>

#include "specs/dgp.hpp"
#include "specs/estimators.hpp"
#include "specs/monte_carlo.hpp"
#include "specs/tuning.hpp"

using namespace specs;

static void BM_BuildDesign(benchmark::State& state) {
    DgpSpec spec;
    spec.family = DgpFamily::table2_high_we;
    spec.adjustment = -0.4;
    const GeneratedData data = gen_vecm(spec, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            build_cecm_design(data.panel, 1, Deterministics::constant_and_trend));
    }
}
BENCHMARK(BM_BuildDesign);

static void BM_GenVecm(benchmark::State& state) {
    DgpSpec spec;
    spec.family = static_cast<DgpFamily>(state.range(0));
    spec.adjustment = -0.4;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gen_vecm(spec, seed++));
    }
}
BENCHMARK(BM_GenVecm)
    ->Arg(static_cast<int>(DgpFamily::table2_low_we))
    ->Arg(static_cast<int>(DgpFamily::table2_high_we))
    ->Arg(static_cast<int>(DgpFamily::nonsparse_vecm));

static void BM_AdfTest(benchmark::State& state) {
    Rng rng(5);
    Vector walk(500);
    double level = 0.0;
    for (Index t = 0; t < 500; ++t) {
        level += rng.normal();
        walk[t] = level;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(adf_test(walk));
    }
}
BENCHMARK(BM_AdfTest);

static void BM_MonteCarloReplication(benchmark::State& state) {
    McConfig config;
    config.dgp.family = DgpFamily::table2_low_we;
    config.dgp.adjustment = -0.4;
    config.n_reps = 1;
    config.estimators = {Estimator::specs1, Estimator::adl, Estimator::ols_oracle};
    std::uint64_t seed = 100;
    for (auto _ : state) {
        config.base_seed = seed++;
        benchmark::DoNotOptimize(run_monte_carlo(config));
    }
}
BENCHMARK(BM_MonteCarloReplication)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
