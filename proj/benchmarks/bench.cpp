#include <benchmark/benchmark.h>

#include "pacsp/ac3.hpp"
#include "pacsp/baselines.hpp"
#include "pacsp/generator.hpp"
#include "pacsp/oracle.hpp"
#include "pacsp/pac.hpp"
#include "pacsp/search.hpp"

using namespace pacsp;

namespace {

CspInstance dense_instance(int n, int m, double p2) {
    return generate(GenSpec{n, m, 1.0, p2, 12345});
}

void BM_Generate(benchmark::State& state) {
    GenSpec spec{20, 10, 1.0, 0.15, 0};
    for (auto _ : state) {
        spec.seed++;
        benchmark::DoNotOptimize(generate(spec));
    }
}
BENCHMARK(BM_Generate);

void BM_Ac3(benchmark::State& state) {
    const CspInstance inst = dense_instance(static_cast<int>(state.range(0)), 10, 0.3);
    for (auto _ : state)
        benchmark::DoNotOptimize(ac3(inst));
}
BENCHMARK(BM_Ac3)->Arg(10)->Arg(20)->Arg(30);

void BM_PropagateRound(benchmark::State& state) {
    const CspInstance inst = dense_instance(static_cast<int>(state.range(0)), 10, 0.15);
    PropagationConfig cfg;
    cfg.epsilon = 1e-300; // never converges; measures raw round cost
    cfg.max_iter = 1;
    for (auto _ : state) {
        Propagator p(inst, cfg);
        p.step();
        benchmark::DoNotOptimize(p.state());
    }
}
BENCHMARK(BM_PropagateRound)->Arg(10)->Arg(20)->Arg(30);

void BM_PropagateFull(benchmark::State& state) {
    const CspInstance inst = dense_instance(20, 10, 0.15);
    PropagationConfig cfg;
    cfg.epsilon = 1e-5;
    cfg.max_iter = 1000;
    for (auto _ : state)
        benchmark::DoNotOptimize(propagate(inst, cfg));
}
BENCHMARK(BM_PropagateFull);

void BM_Enumerate(benchmark::State& state) {
    const CspInstance inst = dense_instance(10, 4, 0.25);
    for (auto _ : state)
        benchmark::DoNotOptimize(enumerate(inst));
}
BENCHMARK(BM_Enumerate);

void BM_SstFullCounts(benchmark::State& state) {
    const CspInstance inst = dense_instance(20, 10, 0.15);
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_beliefs(inst, EstimatorKind::Sst));
}
BENCHMARK(BM_SstFullCounts);

void BM_SolveDynamicPac(benchmark::State& state) {
    const CspInstance inst = dense_instance(14, 6, 0.18);
    HeuristicSpec h;
    h.variable_rule = VariableRule::MaxBelief;
    h.value_rule = ValueRule::MaxBelief;
    h.belief_source = BeliefSource::Dynamic;
    h.estimator = EstimatorKind::Pac;
    for (auto _ : state)
        benchmark::DoNotOptimize(solve(inst, h));
}
BENCHMARK(BM_SolveDynamicPac);

} // namespace

BENCHMARK_MAIN();
