#include <benchmark/benchmark.h>

#include "specs/dgp.hpp"
#include "specs/solver.hpp"
#include "specs/tuning.hpp"

using namespace specs;

namespace {

struct Problem {
    CecmDesign design;
    AdaptiveWeights weights;
    double lambda_max = 0.0;
};

Problem make_problem(DgpFamily family, double adjustment, std::uint64_t seed) {
    DgpSpec spec;
    spec.family = family;
    spec.adjustment = adjustment;
    const GeneratedData data = gen_vecm(spec, seed);
    Problem problem;
    problem.design = build_cecm_design(data.panel, 1, Deterministics::constant_and_trend);
    problem.weights = compute_weights(ridge_init(problem.design), 2.0, 1.0,
                                      problem.design.n_series);
    problem.lambda_max = lambda_max_individual(problem.design, problem.weights);
    return problem;
}

}  // namespace

static void BM_SingleFitLowDim(benchmark::State& state) {
    const Problem p = make_problem(DgpFamily::table2_low_we, -0.4, 42);
    const double li = p.lambda_max * 0.05;
    for (auto _ : state) {
        benchmark::DoNotOptimize(specs_fit(p.design, p.weights, li, 0.0));
    }
}
BENCHMARK(BM_SingleFitLowDim);

static void BM_SingleFitHighDim(benchmark::State& state) {
    const Problem p = make_problem(DgpFamily::table2_high_we, -0.4, 42);
    const double li = p.lambda_max * 0.05;
    for (auto _ : state) {
        benchmark::DoNotOptimize(specs_fit(p.design, p.weights, li, 0.0));
    }
}
BENCHMARK(BM_SingleFitHighDim);

static void BM_GroupFit(benchmark::State& state) {
    const Problem p = make_problem(DgpFamily::table2_low_we, -0.4, 42);
    const double li = p.lambda_max * 0.05;
    const double lg = 2.0 * p.design.levels_proj().transpose().cwiseAbs().maxCoeff();
    for (auto _ : state) {
        benchmark::DoNotOptimize(specs_fit(p.design, p.weights, li, 0.1 * lg));
    }
}
BENCHMARK(BM_GroupFit);

static void BM_PathLowDim(benchmark::State& state) {
    const Problem p = make_problem(DgpFamily::table2_low_we, -0.4, 42);
    const PenaltyGrid grid = build_grid(p.design, p.weights, 100, 1, 1e-2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(specs_path(p.design, p.weights, grid));
    }
}
BENCHMARK(BM_PathLowDim);

static void BM_FullGridHighDim(benchmark::State& state) {
    const Problem p = make_problem(DgpFamily::table2_high_we, -0.4, 42);
    const PenaltyGrid grid = build_grid(p.design, p.weights, 100, 10, 1e-2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(specs_path(p.design, p.weights, grid));
    }
}
BENCHMARK(BM_FullGridHighDim)->Unit(benchmark::kMillisecond);

static void BM_RidgeInit(benchmark::State& state) {
    const Problem p = make_problem(DgpFamily::table2_high_we, -0.4, 42);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ridge_init(p.design));
    }
}
BENCHMARK(BM_RidgeInit);

BENCHMARK_MAIN();
