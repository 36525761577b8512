#include <benchmark/benchmark.h>

#include <random>

#include "pcnls/grid.hpp"
#include "pcnls/model.hpp"
#include "pcnls/symmetry.hpp"
#include "pcnls/variational.hpp"

namespace {

using namespace pcnls;

GridSpec grid_for(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    return GridSpec::build(3, 2, {6.0}, {n});
}

Field random_field(const GridSpec& g) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field u(g);
    for (double& v : u.values()) v = dist(rng);
    return u;
}

void BM_Laplacian(benchmark::State& state) {
    const GridSpec g = grid_for(state);
    const Field u = random_field(g);
    for (auto _ : state) benchmark::DoNotOptimize(laplacian_apply(u));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_Laplacian)->Arg(31)->Arg(47)->Arg(63);

void BM_ShiftedSolve(benchmark::State& state) {
    const GridSpec g = grid_for(state);
    const Field v = potential_values(g);
    const Field rhs = random_field(g);
    for (auto _ : state) benchmark::DoNotOptimize(solve_shifted_operator(v, rhs, 1e-9));
}
BENCHMARK(BM_ShiftedSolve)->Arg(31)->Arg(47)->Unit(benchmark::kMillisecond);

void BM_SymmetrizeKOdd(benchmark::State& state) {
    const GridSpec g = grid_for(state);
    const SymmetryGroup group = SymmetryGroup::resolve(SymmetryConstraint::k_odd(2), g);
    const Field u = random_field(g);
    for (auto _ : state) benchmark::DoNotOptimize(group.symmetrize(u));
}
BENCHMARK(BM_SymmetrizeKOdd)->Arg(31)->Arg(47)->Arg(63);

void BM_Energy(benchmark::State& state) {
    const GridSpec g = grid_for(state);
    const EnergyFunctional functional(NonlinearityModel::pure_power(4.0), potential_values(g));
    const Field u = random_field(g);
    for (auto _ : state) benchmark::DoNotOptimize(functional.energy(u));
}
BENCHMARK(BM_Energy)->Arg(31)->Arg(47)->Arg(63);

}  // namespace

BENCHMARK_MAIN();
