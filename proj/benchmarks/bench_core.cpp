#include <benchmark/benchmark.h>

#include <random>

#include "dstirap/adiabatic_basis.hpp"
#include "dstirap/angular.hpp"
#include "dstirap/morris_shore.hpp"
#include "dstirap/propagator.hpp"

using namespace dstirap;

namespace {

Matrix random_complex(int rows, int cols, std::mt19937& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = Complex{dist(rng), dist(rng)};
    }
    return m;
}

RwaHamiltonian fig4_hamiltonian() {
    const auto spec = LinkageSpec::make(
        1, 2, 3, FieldSpec::from_angles(52.0, 1.3376, 1.1814, 0.0),
        FieldSpec::from_angles(42.0, 0.4636, 1.8925, 2.8198));
    return RwaHamiltonian(build_couplings(spec), 0.0, PulseEnvelope::gaussian(3.0, 6.0),
                          PulseEnvelope::gaussian(-3.0, 6.0));
}

}  // namespace

static void BM_ClebschGordan(benchmark::State& state) {
    double acc = 0.0;
    for (auto _ : state) {
        for (int two_m = -4; two_m <= 4; two_m += 2) {
            acc += clebsch_gordan_2(4, two_m, 2, 0, 6, two_m);
        }
    }
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_ClebschGordan);

static void BM_MsDecompose(benchmark::State& state) {
    std::mt19937 rng(1);
    const int n = static_cast<int>(state.range(0));
    const Matrix s = random_complex(n, n + 1, rng);
    for (auto _ : state) {
        auto dec = ms_decompose(s);
        benchmark::DoNotOptimize(dec.sigma);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MsDecompose)->RangeMultiplier(2)->Range(2, 16)->Complexity();

static void BM_DarkFamily(benchmark::State& state) {
    std::mt19937 rng(2);
    const Matrix p = random_complex(3, 4, rng);
    const Matrix s = random_complex(4, 5, rng);
    for (auto _ : state) {
        auto family = dark_states(p, s);
        benchmark::DoNotOptimize(family.count());
    }
}
BENCHMARK(BM_DarkFamily);

static void BM_BrightEvaluate(benchmark::State& state) {
    std::mt19937 rng(3);
    const Matrix p = random_complex(3, 5, rng);
    const Matrix s = random_complex(5, 7, rng);
    const BrightStateFamily family(p, s, 0.0);
    for (auto _ : state) {
        auto states = family.evaluate(0.7, 0.5);
        benchmark::DoNotOptimize(states.size());
    }
}
BENCHMARK(BM_BrightEvaluate);

static void BM_IntegrateFig4(benchmark::State& state) {
    const auto h = fig4_hamiltonian();
    Vector psi0 = Vector::Zero(15);
    psi0[2] = 1.0;
    IntegratorOptions options;
    options.output_samples = 2;
    for (auto _ : state) {
        auto traj = integrate(h, psi0, -27.0, 27.0, options);
        benchmark::DoNotOptimize(traj.stats.accepted);
    }
}
BENCHMARK(BM_IntegrateFig4);

BENCHMARK_MAIN();
