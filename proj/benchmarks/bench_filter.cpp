#include <benchmark/benchmark.h>

#include <pspp/simulate.hpp>

using namespace pspp;

namespace {

StateSpaceSpec bivariate_spec(ObsMode obs) {
    StateSpaceSpec spec;
    spec.b = Matrix::Identity(2, 2);
    spec.c = Matrix::Identity(2, 2);
    spec.evolution = Matrix(Matrix::Identity(2, 2));
    spec.obs = std::move(obs);
    return spec;
}

FilterState matrix_belief_state() {
    FilterState st;
    st.m = Vector::Zero(2);
    st.p_mat = Matrix::Identity(2, 2);
    MatrixVarBelief b;
    b.v_hat = Matrix::Identity(2, 2);
    b.k = Matrix(1e-3 * Matrix::Identity(3, 3));
    b.eta = 8.0;
    st.var_belief = b;
    return st;
}

std::vector<Vector> bench_series(int length) {
    SimSpec spec;
    spec.length = length;
    spec.seed = 17;
    return simulate_series(spec, 0);
}

}  // namespace

static void BM_PsppDlmStep(benchmark::State& state) {
    const StateSpaceSpec spec = bivariate_spec(MatrixV{});
    const FilterState st = matrix_belief_state();
    const Vector y{{0.8, -1.4}};
    for (auto _ : state) {
        auto out = pspp_dlm_step(st, spec, y);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_PsppDlmStep);

static void BM_KalmanStepKnownV(benchmark::State& state) {
    const StateSpaceSpec spec =
        bivariate_spec(KnownV{Matrix{{1.0, 2.0}, {2.0, 5.0}}});
    FilterState st;
    st.m = Vector::Zero(2);
    st.p_mat = Matrix::Identity(2, 2);
    const Vector y{{0.8, -1.4}};
    for (auto _ : state) {
        auto out = kalman_step_known_v(st, spec, y);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_KalmanStepKnownV);

static void BM_FilterSeries(benchmark::State& state) {
    const auto ys = bench_series(static_cast<int>(state.range(0)));
    const StateSpaceSpec spec = bivariate_spec(MatrixV{});
    for (auto _ : state) {
        FilterState st = matrix_belief_state();
        for (const auto& y : ys) {
            auto [next, rep] = pspp_dlm_step(st, spec, y);
            st = std::move(next);
            benchmark::DoNotOptimize(rep);
        }
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FilterSeries)->Arg(100)->Arg(500);

static void BM_SimulateSeries(benchmark::State& state) {
    SimSpec spec;
    spec.length = static_cast<int>(state.range(0));
    spec.seed = 3;
    int index = 0;
    for (auto _ : state) {
        auto ys = simulate_series(spec, index++);
        benchmark::DoNotOptimize(ys);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateSeries)->Arg(500);

BENCHMARK_MAIN();
