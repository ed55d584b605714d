#include <benchmark/benchmark.h>

#include <pspp/linalg.hpp>
#include <pspp/rng.hpp>

using namespace pspp;

namespace {

Matrix bench_spd(Index p) {
    Rng rng(23);
    Matrix a(p, p);
    for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < p; ++j) a(i, j) = rng.normal();
    }
    return symmetrize(a * a.transpose() + 0.5 * Matrix::Identity(p, p));
}

}  // namespace

static void BM_SymSqrt(benchmark::State& state) {
    const Matrix s = bench_spd(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sym_sqrt(s));
    }
}
BENCHMARK(BM_SymSqrt)->Arg(2)->Arg(4)->Arg(8);

static void BM_SpdInverse(benchmark::State& state) {
    const Matrix s = bench_spd(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(spd_inverse(s));
    }
}
BENCHMARK(BM_SpdInverse)->Arg(2)->Arg(4)->Arg(8);

static void BM_DuplicationMatrix(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(duplication_matrix(state.range(0)));
    }
}
BENCHMARK(BM_DuplicationMatrix)->Arg(2)->Arg(4)->Arg(8);

static void BM_VechRoundTrip(benchmark::State& state) {
    const Matrix s = bench_spd(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(unvech(vech(s), s.rows()));
    }
}
BENCHMARK(BM_VechRoundTrip)->Arg(2)->Arg(6);

BENCHMARK_MAIN();
