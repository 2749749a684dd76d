#include <benchmark/benchmark.h>

#include "kfs/chern.hpp"
#include "kfs/oracle.hpp"
#include "kfs/prep.hpp"
#include "kfs/protocols.hpp"

using namespace kfs;

namespace {

const Lattice& lattice() {
    static const Lattice L = default_lattice();
    return L;
}

const Encoding& encoding() {
    static const Encoding enc(lattice());
    return enc;
}

const CorrelationMatrix& vacuum() {
    static const CorrelationMatrix g = vacuum_state(encoding());
    return g;
}

}  // namespace

static void BM_VacuumState(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(vacuum_state(encoding()));
}
BENCHMARK(BM_VacuumState)->Unit(benchmark::kMillisecond);

static void BM_ApplyLayer(benchmark::State& state) {
    CorrelationMatrix g = vacuum();
    const Layer layer = link_layer(lattice(), LinkType::XX, 0.125);
    for (auto _ : state) {
        apply_layer(g, encoding(), layer);
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_ApplyLayer)->Unit(benchmark::kMicrosecond);

static void BM_PrepTrajectory(benchmark::State& state) {
    const std::vector<int> target(lattice().plaquettes().size(), 1);
    const NoiseModel noise;
    Rng rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(run_prep_circuit(lattice(), PrepMethod::ZXXZ32, noise, target, rng));
}
BENCHMARK(BM_PrepTrajectory)->Unit(benchmark::kMicrosecond);

static void BM_NoisyExchange(benchmark::State& state) {
    const auto plq = exchange_plaquette(encoding());
    const NoiseModel noise;
    Rng rng(2);
    for (auto _ : state) {
        FermionRun run = start_from(encoding(), vacuum(), noise, rng);
        run_exchange(run, plq, ExchangeVariant::FullExchange, noise, rng);
        benchmark::DoNotOptimize(run.gamma.data());
    }
}
BENCHMARK(BM_NoisyExchange)->Unit(benchmark::kMicrosecond);

static void BM_ChernFromState(benchmark::State& state) {
    CorrelationMatrix g = vacuum();
    for (const Layer& l : phase_prep_circuit(lattice(), phase_b_prep())) apply_layer(g, encoding(), l);
    const int grid = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(chern_from_table(bulk_average(g, encoding()), grid));
}
BENCHMARK(BM_ChernFromState)->Arg(5)->Arg(9)->Unit(benchmark::kMillisecond);

static void BM_StatevectorRotation(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    DenseState s(n);
    for (int q = 0; q < n; ++q) s.h(q);
    PauliString p = PauliString::single(0, Pauli::X) * PauliString::single(n - 1, Pauli::Y);
    for (auto _ : state) {
        s.pauli_rotation(p, 0.3);
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << n));
}
BENCHMARK(BM_StatevectorRotation)->Arg(12)->Arg(18)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
