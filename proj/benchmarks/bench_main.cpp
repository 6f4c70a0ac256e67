#include <blochlab/band_structure.hpp>
#include <blochlab/initial_states.hpp>
#include <blochlab/momentum_dynamics.hpp>
#include <blochlab/observables.hpp>
#include <blochlab/oracle.hpp>
#include <blochlab/position_space.hpp>

#include <benchmark/benchmark.h>

#include <numbers>

using namespace blochlab;

namespace {

SolveOptions options(std::size_t nk, int cutoff, std::size_t nb)
{
    SolveOptions o;
    o.num_k = nk;
    o.cutoff = cutoff;
    o.num_bands = nb;
    return o;
}

const BandStructure& deep()
{
    static const BandStructure b = solve_bands(CrystalPotential::cosine(-40.0, 1.0), {}, options(256, 32, 4));
    return b;
}

} // namespace

static void BM_SolveBands(benchmark::State& st)
{
    const auto nk = static_cast<std::size_t>(st.range(0));
    const auto pot = CrystalPotential::cosine(-40.0, 1.0);
    for (auto _ : st) benchmark::DoNotOptimize(solve_bands(pot, {}, options(nk, 32, 4)));
}
BENCHMARK(BM_SolveBands)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_EvolveDecoupled(benchmark::State& st)
{
    const DecoupledPropagator prop(deep(), 0.05, 1);
    const auto s = gaussian_state(0.1, 0.0, 1.0, 256);
    const double tau = 77 * deep().grid().spacing();
    for (auto _ : st) benchmark::DoNotOptimize(prop.evolve(s, tau));
}
BENCHMARK(BM_EvolveDecoupled);

static void BM_Trace(benchmark::State& st)
{
    const auto w = wannier_state(1.0, 256);
    std::vector<double> taus;
    for (int i = 0; i <= 256; ++i) taus.push_back(i * 2 * deep().grid().spacing());
    for (auto _ : st) benchmark::DoNotOptimize(trace(w, deep(), 0.05, taus, {}));
}
BENCHMARK(BM_Trace)->Unit(benchmark::kMillisecond);

static void BM_Reconstruct(benchmark::State& st)
{
    const auto w = wannier_state(1.0, 256);
    const XGrid xg = default_x_grid(w, deep(), 0.05);
    for (auto _ : st) benchmark::DoNotOptimize(reconstruct(w, deep(), 0.05, std::numbers::pi, xg));
}
BENCHMARK(BM_Reconstruct)->Unit(benchmark::kMillisecond);

static void BM_OracleSteps(benchmark::State& st)
{
    OracleConfig cfg{128.0, 4096, 1e-3, static_cast<int>(st.range(0))};
    cfg.absorbed_budget = 1.0;
    const auto w = wannier_state(1.0, 256);
    const auto psi0 = synthesize_position_state(w, deep(), cfg.box());
    const double taus[] = {0.1};
    for (auto _ : st) {
        benchmark::DoNotOptimize(split_step_evolve(CrystalPotential::cosine(-40.0, 1.0), {}, 0.05, psi0, taus, cfg));
    }
    st.SetItemsProcessed(st.iterations() * 100);
}
BENCHMARK(BM_OracleSteps)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
