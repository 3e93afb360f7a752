#include <benchmark/benchmark.h>

#include <random>

#include "kamtori/kam.hpp"
#include "kamtori/presets.hpp"

using namespace kamtori;

namespace {

TruncatedSeries random_series(const SeriesSpace& sp, int max_deg,
                              std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_int_distribution<int> exp(0, max_deg);
    TruncatedSeries f(sp);
    for (int t = 0; t < 200; ++t) {
        std::vector<int> e(sp.n_vars(), 0);
        int budget = max_deg;
        for (int v = 0; v < sp.n_vars() && budget > 0; ++v) {
            int x = exp(rng) % (budget + 1);
            e[v] = x;
            budget -= x;
        }
        f.add_to(pack_exponents(e), Complex(coeff(rng), coeff(rng)));
    }
    return f;
}

void BM_multiply(benchmark::State& state) {
    std::mt19937_64 rng(7);
    SeriesSpace sp(2, int(state.range(0)));
    auto a = random_series(sp, int(state.range(0)), rng);
    auto b = random_series(sp, int(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(multiply(a, b));
}
BENCHMARK(BM_multiply)->Arg(6)->Arg(8)->Arg(10);

void BM_substitute(benchmark::State& state) {
    std::mt19937_64 rng(11);
    SeriesSpace sp(2, 8);
    auto f = random_series(sp, 8, rng);
    auto g = random_series(sp, 4, rng) * 0.1;
    g = g.filtered([](MonoKey k) { return total_degree(k) >= 1; });
    std::vector<std::optional<TruncatedSeries>> subs(sp.n_vars());
    subs[0] = TruncatedSeries::variable(sp, VarRole::Z, 0) + g;
    for (auto _ : state) benchmark::DoNotOptimize(substitute(f, subs));
}
BENCHMARK(BM_substitute);

void BM_solve_L(benchmark::State& state) {
    std::mt19937_64 rng(13);
    SeriesSpace sp(2, 8);
    auto f = random_series(sp, 8, rng);
    OmegaSpec omega{{1.0, 0.61803398874989485}};
    DiophantineParams p{1e-2, 2.0};
    for (auto _ : state) benchmark::DoNotOptimize(solve_L(f, omega, p));
}
BENCHMARK(BM_solve_L);

void BM_bnf(benchmark::State& state) {
    HamiltonianSpec spec = make_preset("nondegenerate-cubic");
    for (auto _ : state)
        benchmark::DoNotOptimize(
            birkhoff_normal_form(spec, int(state.range(0))));
}
BENCHMARK(BM_bnf)->Arg(5)->Arg(7);

void BM_inductive_step(benchmark::State& state) {
    KamParams params;
    params.steps = 0;
    NormalFormState st = normal_form(make_preset("nondegenerate-cubic"), params);
    for (auto _ : state) benchmark::DoNotOptimize(inductive_step(st));
}
BENCHMARK(BM_inductive_step);

}  // namespace

BENCHMARK_MAIN();
