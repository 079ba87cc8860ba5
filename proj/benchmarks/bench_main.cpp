// Microbenchmarks for the numerical kernels: quadrature, turning points,
// action jets, fundamental-matrix integration, and small-matrix spectra.

#include <benchmark/benchmark.h>

#include "wavestab/action.hpp"
#include "wavestab/evans.hpp"
#include "wavestab/stability.hpp"

using namespace wavestab;

namespace {

struct KdvFixture {
    NonlinearModel model = make_builtin("kdv3");
    WaveParamsQ params;
    TurningPoints tp;
    KdvFixture() {
        const auto well = find_well(model, -60.0, 60.0);
        params = {well.well_min + 0.4 * (*well.barrier_mu - well.well_min), -60.0, 60.0};
        tp = find_turning_points(model, params);
    }
};

const KdvFixture& kdv() {
    static const KdvFixture f;
    return f;
}

void BM_TurningPoints(benchmark::State& state) {
    const auto& f = kdv();
    for (auto _ : state) {
        auto tp = find_turning_points(f.model, f.params);
        benchmark::DoNotOptimize(tp.v3);
    }
}
BENCHMARK(BM_TurningPoints);

void BM_ProfileIntegrals(benchmark::State& state) {
    const auto& f = kdv();
    Numerics num;
    num.delta_omega = 1e-4 * static_cast<double>(state.range(0));
    for (auto _ : state) {
        auto ints = profile_integrals(f.model, f.params, f.tp, num);
        benchmark::DoNotOptimize(ints.action);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ProfileIntegrals)->Arg(1)->Arg(4)->Arg(16);

void BM_ActionJet(benchmark::State& state) {
    const auto& f = kdv();
    Numerics num;
    FdSettings fd;
    fd.delta_nu = 0.005;
    fd.absolute = true;
    for (auto _ : state) {
        auto jet = action_jet_qkdv(f.model, f.params, num, fd);
        benchmark::DoNotOptimize(jet.hess(0, 0));
    }
}
BENCHMARK(BM_ActionJet);

void BM_ProfileReconstruction(benchmark::State& state) {
    const auto& f = kdv();
    for (auto _ : state) {
        auto prof = reconstruct_profile(f.model, f.params, f.tp, 4096);
        benchmark::DoNotOptimize(prof.drift);
    }
}
BENCHMARK(BM_ProfileReconstruction);

void BM_EvansFundamentalMatrix(benchmark::State& state) {
    const auto& f = kdv();
    const auto prof = reconstruct_profile(f.model, f.params, f.tp, 4096);
    EvansSettings st;
    st.n_grid = static_cast<int>(state.range(0));
    st.r_count = 4;
    st.r_max = 10.0;
    for (auto _ : state) {
        auto scan = evans_scan_qkdv(prof, f.model, f.params, st);
        benchmark::DoNotOptimize(scan.value[0]);
    }
}
BENCHMARK(BM_EvansFundamentalMatrix)->Arg(4096)->Arg(16384);

void BM_JacobiSignature(benchmark::State& state) {
    Mat4 h;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) h(i, j) = 1.0 / (1.0 + i + j); // Hilbert-like
    for (auto _ : state) {
        auto sig = signature(h);
        benchmark::DoNotOptimize(sig.n_neg);
    }
}
BENCHMARK(BM_JacobiSignature);

void BM_ChainRuleHessian(benchmark::State& state) {
    ActionJet3 jet;
    jet.grad = {1.0, 0.2, 1.5};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) jet.hess(i, j) = 1.0 / (1.0 + i + j);
    for (auto _ : state) {
        auto H = chain_rule_hessian(jet, 0.7, 0.3);
        benchmark::DoNotOptimize(H(3, 3));
    }
}
BENCHMARK(BM_ChainRuleHessian);

} // namespace

BENCHMARK_MAIN();
