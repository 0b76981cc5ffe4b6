#include <benchmark/benchmark.h>

#include "mfilt/conditional.hpp"
#include "mfilt/filtered_space.hpp"
#include "mfilt/norm_estimator.hpp"
#include "mfilt/positive_operator.hpp"
#include "mfilt/principal_sets.hpp"
#include "mfilt/sawyer_testing.hpp"

#include <random>

using namespace mfilt;

namespace {

LeafFunction random_f(const FilteredSpace& space, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 4.0);
    LeafFunction f(space.n_leaves());
    for (auto& v : f) v = unif(rng);
    return f;
}

void BM_CondExpect(benchmark::State& state) {
    FilteredSpace space = generate_dyadic(static_cast<int>(state.range(0)), 2,
                                          WeightMode::LogUniform, 1);
    LeafFunction f = random_f(space, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(cond_expect(space, f, static_cast<int>(space.n_levels()) / 2));
    state.SetComplexityN(static_cast<std::int64_t>(space.n_leaves()));
}
BENCHMARK(BM_CondExpect)->DenseRange(4, 14, 2)->Complexity();

void BM_Apply(benchmark::State& state) {
    FilteredSpace space = generate_dyadic(static_cast<int>(state.range(0)), 2,
                                          WeightMode::LogUniform, 1);
    CoefficientFamily alpha = random_coefficients(space, 3);
    LeafFunction f = random_f(space, 2);
    for (auto _ : state) benchmark::DoNotOptimize(apply(space, alpha, f));
}
BENCHMARK(BM_Apply)->DenseRange(4, 12, 2);

void BM_TestingConstant(benchmark::State& state) {
    FilteredSpace space = generate_dyadic(static_cast<int>(state.range(0)), 2,
                                          WeightMode::LogUniform, 1);
    CoefficientFamily alpha = random_coefficients(space, 3);
    ExponentPair ep(1.5, 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(testing_constant(space, alpha, ep));
}
BENCHMARK(BM_TestingConstant)->DenseRange(4, 12, 2);

void BM_BruteForceTesting(benchmark::State& state) {
    // subset enumeration grows as 2^atoms; keep the space shallow
    FilteredSpace space = generate_random_tree(3, static_cast<int>(state.range(0)),
                                               WeightMode::LogUniform, 5);
    CoefficientFamily alpha = random_coefficients(space, 3);
    ExponentPair ep(2.0, 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_testing(space, alpha, ep));
}
BENCHMARK(BM_BruteForceTesting)->DenseRange(6, 14, 4);

void BM_BuildPrincipalTree(benchmark::State& state) {
    FilteredSpace space = generate_dyadic(static_cast<int>(state.range(0)), 2,
                                          WeightMode::LogUniform, 1);
    LeafFunction f = random_f(space, 2);
    for (auto _ : state) benchmark::DoNotOptimize(build_principal_tree(space, f, 0));
}
BENCHMARK(BM_BuildPrincipalTree)->DenseRange(4, 12, 2);

void BM_NormLowerBound(benchmark::State& state) {
    FilteredSpace space = generate_dyadic(static_cast<int>(state.range(0)), 2,
                                          WeightMode::LogUniform, 1);
    CoefficientFamily alpha = random_coefficients(space, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(norm_lower_bound(space, alpha, 2.0, 3.0, 2, 100, 1e-10, 1));
}
BENCHMARK(BM_NormLowerBound)->DenseRange(3, 7, 2);

}  // namespace

BENCHMARK_MAIN();
