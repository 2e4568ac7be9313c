// Serial reference vs OpenMP kernels on the hot paths: stencil application,
// band evaluation + stop update, chattering allocation, and the quadratic
// weak-norm scan.
#include <benchmark/benchmark.h>

#include <random>

#include "hyrelax/controls.hpp"
#include "hyrelax/geometry.hpp"
#include "hyrelax/hysteresis.hpp"

using namespace hyrelax;

namespace {

std::mt19937_64 rng(1);
double unit() { return (rng() >> 11) * 0x1.0p-53; }

Field random_field(const GridSpec& g, double lo, double hi) {
    Field f(g);
    for (auto& x : f.values) x = lo + (hi - lo) * unit();
    return f;
}

}  // namespace

static void BM_laplacian_serial(benchmark::State& state) {
    const GridSpec g = GridSpec::line(static_cast<int>(state.range(0)));
    const Field f = random_field(g, -1.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(neumann_laplacian_serial(f));
}
BENCHMARK(BM_laplacian_serial)->Arg(1 << 14)->Arg(1 << 18);

static void BM_laplacian_omp(benchmark::State& state) {
    const GridSpec g = GridSpec::line(static_cast<int>(state.range(0)));
    const Field f = random_field(g, -1.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(neumann_laplacian(f));
}
BENCHMARK(BM_laplacian_omp)->Arg(1 << 14)->Arg(1 << 18);

namespace {

struct StopBench {
    GridSpec g;
    Preset p;
    ConstraintBand band_old, band_new;
    Field sigma, F, vdot, wdot;

    explicit StopBench(int n) : g(GridSpec::line(n)), p(preset("budworm", g)) {
        const Field v = random_field(g, 0.0, 2.0);
        const Field w = random_field(g, 0.0, 2.0);
        Field v2 = v, w2 = w;
        for (auto& x : v2.values) x = std::clamp(x + 0.02 * (2.0 * unit() - 1.0), 0.0, 2.0);
        for (auto& x : w2.values) x = std::clamp(x + 0.02 * (2.0 * unit() - 1.0), 0.0, 2.0);
        band_old = eval_bounds(p.model, v, w);
        band_new = eval_bounds(p.model, v2, w2);
        sigma = Field(g);
        for (int i = 0; i < n; ++i)
            sigma.values[i] =
                band_old.lower[i] + (band_old.upper[i] - band_old.lower[i]) * unit();
        F = random_field(g, -1.0, 1.0);
        vdot = random_field(g, -1.0, 1.0);
        wdot = random_field(g, -1.0, 1.0);
    }
};

}  // namespace

static void BM_sigma_step_serial(benchmark::State& state) {
    StopBench b(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(sigma_step_serial(b.sigma, b.band_old, b.band_new, b.F,
                                                   b.p.model.a, b.vdot, b.wdot, 1e-3));
}
BENCHMARK(BM_sigma_step_serial)->Arg(1 << 14)->Arg(1 << 18);

static void BM_sigma_step_omp(benchmark::State& state) {
    StopBench b(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(sigma_step(b.sigma, b.band_old, b.band_new, b.F, b.p.model.a,
                                            b.vdot, b.wdot, 1e-3));
}
BENCHMARK(BM_sigma_step_omp)->Arg(1 << 14)->Arg(1 << 18);

namespace {

RelaxedControl random_rc(int steps, int cells) {
    RelaxedControl rc;
    rc.dt = 1.0 / steps;
    rc.n_steps = steps;
    rc.n_cells = cells;
    rc.n_gen = 2;
    rc.weights.resize(static_cast<std::size_t>(steps) * cells * 2);
    for (std::size_t k = 0; k < rc.weights.size(); k += 2) {
        const double lam = unit();
        rc.weights[k] = lam;
        rc.weights[k + 1] = 1.0 - lam;
    }
    return rc;
}

RealizedControl random_realized(int steps, const GridSpec& g) {
    RealizedControl u;
    u.grid = g;
    u.dt = 1.0 / steps;
    u.n_steps = steps;
    u.values.resize(static_cast<std::size_t>(steps) * g.cells());
    for (auto& x : u.values) x = 2.0 * unit() - 1.0;
    return u;
}

}  // namespace

static void BM_chatter_serial(benchmark::State& state) {
    const RelaxedControl rc = random_rc(800, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(chatter_serial(rc, 40));
}
BENCHMARK(BM_chatter_serial)->Arg(64)->Arg(1024);

static void BM_chatter_omp(benchmark::State& state) {
    const RelaxedControl rc = random_rc(800, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(chatter(rc, 40));
}
BENCHMARK(BM_chatter_omp)->Arg(64)->Arg(1024);

static void BM_weak_norm_serial(benchmark::State& state) {
    const GridSpec g = GridSpec::line(64);
    const int steps = static_cast<int>(state.range(0));
    const RealizedControl u1 = random_realized(steps, g);
    const RealizedControl u2 = random_realized(steps, g);
    for (auto _ : state) benchmark::DoNotOptimize(weak_norm_defect_serial(u1, u2));
}
BENCHMARK(BM_weak_norm_serial)->Arg(400)->Arg(800);

static void BM_weak_norm_omp(benchmark::State& state) {
    const GridSpec g = GridSpec::line(64);
    const int steps = static_cast<int>(state.range(0));
    const RealizedControl u1 = random_realized(steps, g);
    const RealizedControl u2 = random_realized(steps, g);
    for (auto _ : state) benchmark::DoNotOptimize(weak_norm_defect(u1, u2));
}
BENCHMARK(BM_weak_norm_omp)->Arg(400)->Arg(800);

BENCHMARK_MAIN();
