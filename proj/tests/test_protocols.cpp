#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kfs/errors.hpp"
#include "kfs/oracle.hpp"
#include "kfs/protocols.hpp"

using namespace kfs;

namespace {

NoiseModel noiseless() {
    NoiseModel n;
    n.p_ini = 0.0;
    n.p_layer = 0.0;
    return n;
}

double target_density(const FermionRun& run, const ExchangePlaquette& plq) {
    return 0.5 * (*run_density(run, plq.a, std::nullopt) + *run_density(run, plq.d, std::nullopt));
}

StringTable prep_table(const Encoding& enc, const PhasePrepSpec& spec) {
    CorrelationMatrix g = vacuum_state(enc);
    for (const Layer& l : phase_prep_circuit(enc.lattice(), spec)) apply_layer(g, enc, l);
    return bulk_average(g, enc);
}

}  // namespace

// ---------------------------------------------------------------------------
// Phase preparation

TEST(PhasePrep, ZeroAnglesLeaveTheVacuum) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    const StringTable t = prep_table(enc, {"XYZXYZ", std::vector<double>(6, 0.0)});
    EXPECT_NEAR(table_overlap(t, bulk_average(vacuum_state(enc), enc)), 1.0, 1e-12);
    EXPECT_EQ(chern_from_table(t).chern, 0);
}

TEST(PhasePrep, AngleCountMustMatchBases) {
    const Lattice L = default_lattice();
    EXPECT_THROW(phase_prep_circuit(L, {"XYZ", {0.1, 0.2}}), SchemaError);
    EXPECT_THROW(phase_prep_circuit(L, {"XQZ", {0.1, 0.2, 0.3}}), SchemaError);
}

TEST(PhasePrep, AbelianCircuitHasZeroChern) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    EXPECT_EQ(chern_from_table(prep_table(enc, abelian_ii_prep())).chern, 0);
}

TEST(PhasePrep, PhaseBCircuitHasChernOne) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    const StringTable t = prep_table(enc, phase_b_prep());
    EXPECT_EQ(chern_from_table(t).chern, 1);
    const StringTable target = bulk_average(floquet_target(enc, 0.25, 0.25, 0.25), enc);
    EXPECT_GT(table_overlap(t, target), 0.98);
}

TEST(PhasePrep, OverlapIsSymmetricAndNormalized) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    const StringTable a = prep_table(enc, abelian_ii_prep());
    const StringTable b = prep_table(enc, phase_b_prep());
    EXPECT_NEAR(table_overlap(a, b), table_overlap(b, a), 1e-14);
    EXPECT_NEAR(table_overlap(a, a), 1.0, 1e-12);
    EXPECT_LE(std::abs(table_overlap(a, b)), 1.0);
}

TEST(Optimizer, VacuumTargetIsReachedExactly) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    const StringTable target = bulk_average(vacuum_state(enc), enc);
    const OptimizeResult r = optimize_prep_angles(enc, target, "XYZ", 1, 3, 1e-6, 400);
    EXPECT_GT(r.objective, 1.0 - 1e-6);
    EXPECT_GT(r.evaluations, 0);
}

TEST(Optimizer, MatchesPublishedAbelianAngles) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    const StringTable target = prep_table(enc, abelian_ii_prep());
    const OptimizeResult r = optimize_prep_angles(enc, target, "XYZ", 4, 11, 1e-7, 1500);
    EXPECT_GT(r.objective, 1.0 - 1e-4);
}

TEST(Optimizer, RejectsEmptyProblems) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    const StringTable t = bulk_average(vacuum_state(enc), enc);
    EXPECT_THROW(optimize_prep_angles(enc, t, "", 1, 0), SchemaError);
    EXPECT_THROW(optimize_prep_angles(enc, t, "XYZ", 0, 0), SchemaError);
}

// ---------------------------------------------------------------------------
// Quench

TEST(Quench, DepthZeroHasTwoParticles) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    QuenchSpec q;
    q.depth = 0;
    const QuenchTrace t = quench_exact(enc, q);
    ASSERT_EQ(t.particle_number.size(), 1u);
    EXPECT_NEAR(t.particle_number[0], 2.0, 1e-12);
    const QuenchLayout lay = quench_layout(enc, q);
    EXPECT_NEAR(t.density[0][static_cast<std::size_t>(lay.pair_a)], 1.0, 1e-12);
    EXPECT_NEAR(t.density[0][static_cast<std::size_t>(lay.pair_b)], 1.0, 1e-12);
}

TEST(Quench, LargeZAngleRevives) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    QuenchSpec slow, fast;
    slow.theta_z = 1.0;
    fast.theta_z = 0.125;
    const auto ns = quench_exact(enc, slow).particle_number;
    const auto nf = quench_exact(enc, fast).particle_number;
    for (int d : {6, 12}) {
        const double excess_slow = ns[static_cast<std::size_t>(d)] - 2.0;
        const double excess_fast = nf[static_cast<std::size_t>(d)] - 2.0;
        EXPECT_LT(excess_slow, 0.25 * excess_fast) << "depth " << d;
    }
    // Equal angles: number grows without revivals.
    for (std::size_t d = 3; d + 1 < nf.size(); ++d) EXPECT_GE(nf[d + 1], nf[d] - 1e-12);
    EXPECT_GT(nf.back(), 8.0);
}

TEST(Quench, OmittedZLayerDoesNotChangeDensities) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    QuenchSpec with, without;
    with.depth = without.depth = 6;
    with.omit_final_z = true;
    without.omit_final_z = false;
    const auto a = quench_exact(enc, with);
    const auto b = quench_exact(enc, without);
    for (std::size_t k = 0; k < a.density.back().size(); ++k) EXPECT_NEAR(a.density.back()[k], b.density.back()[k], 1e-12);
}

TEST(Quench, PauliExclusionAsymmetry) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    QuenchSpec near, far;
    near.depth = far.depth = 11;
    near.separation = 1;
    far.separation = 2;
    const ExclusionAsymmetry an = exclusion_asymmetry(enc, near, quench_exact(enc, near));
    const ExclusionAsymmetry af = exclusion_asymmetry(enc, far, quench_exact(enc, far));
    EXPECT_GE(an.ratio(), 2.0);
    EXPECT_LT(af.ratio(), 1.3);
}

// ---------------------------------------------------------------------------
// Exchange

TEST(Exchange, NoiselessVariants) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    const ExchangePlaquette plq = exchange_plaquette(enc);
    const NoiseModel nm = noiseless();
    Rng rng(5);
    auto final_run = [&](ExchangeVariant v) {
        FermionRun run = start_vacuum(enc, nm, rng);
        run_exchange(run, plq, v, nm, rng);
        return run;
    };
    const FermionRun ret = final_run(ExchangeVariant::HopAndReturn);
    const FermionRun ex = final_run(ExchangeVariant::FullExchange);
    EXPECT_GT(target_density(ret, plq), 1.0 - 1e-9);
    EXPECT_LT(target_density(ex, plq), 1e-9);
    EXPECT_NEAR(target_density(ret, plq) - target_density(ex, plq), 1.0, 1e-9);
    EXPECT_NEAR(total_particle_number(ex.gamma, enc), 0.0, 1e-9);

    const FermionRun c0 = final_run(ExchangeVariant::Control0);
    EXPECT_NEAR(total_particle_number(c0.gamma, enc), 0.0, 1e-9);
    const FermionRun c2 = final_run(ExchangeVariant::Control2);
    EXPECT_NEAR(*run_density(c2, plq.b, std::nullopt), 1.0, 1e-9);
    EXPECT_NEAR(*run_density(c2, plq.c, std::nullopt), 1.0, 1e-9);
    EXPECT_NEAR(*run_density(c2, plq.a, std::nullopt), 0.0, 1e-9);
    EXPECT_NEAR(*run_density(c2, plq.d, std::nullopt), 0.0, 1e-9);
}

TEST(Exchange, HopThenInverseRestoresGamma) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    const ExchangePlaquette plq = exchange_plaquette(enc);
    CorrelationMatrix g = vacuum_state(enc);
    string_rotation(g, enc, plq.creation, std::numbers::pi / 4);
    const CorrelationMatrix before = g;
    for (double sign : {1.0, -1.0})
        for (auto [i, j] : {std::pair{plq.a, plq.b}, std::pair{plq.c, plq.d}})
            for (const auto& s : hop_strings(enc, i, j)) string_rotation(g, enc, s, sign * std::numbers::pi / 4);
    EXPECT_LT((g - before).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Exchange, HopStringsConserveNumber) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    const ExchangePlaquette plq = exchange_plaquette(enc);
    for (auto [i, j] : {std::pair{plq.a, plq.b}, std::pair{plq.a, plq.c}}) {
        CorrelationMatrix g = vacuum_state(enc);
        // Put one fermion on i, then hop it fully to j.
        string_rotation(g, enc, plq.creation, std::numbers::pi / 2);
        const double n0 = total_particle_number(g, enc);
        for (const auto& s : hop_strings(enc, i, j)) string_rotation(g, enc, s, std::numbers::pi / 4);
        EXPECT_NEAR(total_particle_number(g, enc), n0, 1e-9);
        EXPECT_NEAR(density(g, enc, j), 1.0, 1e-9);
        EXPECT_NEAR(density(g, enc, i), 0.0, 1e-9);
    }
}

TEST(Exchange, AgreesWithStatevector) {
    const Lattice L = build_lattice(1, 3, Boundary::Open);
    const Encoding enc(L);
    const ExchangePlaquette plq = exchange_plaquette(enc, 0, 1);
    const NoiseModel nm = noiseless();
    Rng rng(9);

    std::vector<std::pair<PauliString, int>> stabs;
    for (const auto& s : enc.vacuum_stabilizers()) stabs.emplace_back(s.op, s.value);

    for (auto v : {ExchangeVariant::HopAndReturn, ExchangeVariant::FullExchange, ExchangeVariant::Control2}) {
        FermionRun run = start_vacuum(enc, nm, rng);
        run_exchange(run, plq, v, nm, rng);

        DenseState psi = project_stabilizers(enc.num_sites(), stabs);
        const double q = std::numbers::pi / 4;
        auto create = [&] { psi.pauli_rotation(plq.creation, q); };
        auto hop = [&](int i, int j, double sign) {
            for (const auto& s : hop_strings(enc, i, j)) psi.pauli_rotation(s, sign * q);
        };
        if (v == ExchangeVariant::HopAndReturn) {
            create();
            hop(plq.a, plq.b, 1), hop(plq.c, plq.d, 1);
            hop(plq.a, plq.b, -1), hop(plq.c, plq.d, -1);
            create();
        } else if (v == ExchangeVariant::FullExchange) {
            create();
            hop(plq.a, plq.b, 1), hop(plq.c, plq.d, 1);
            hop(plq.a, plq.c, 1), hop(plq.b, plq.d, 1);
            create();
        } else {
            create();
            create();
            hop(plq.a, plq.b, 1), hop(plq.c, plq.d, 1);
        }
        for (int k : {plq.a, plq.b, plq.c, plq.d}) {
            const auto s = dimer_sites(enc, k);
            const double n = 0.5 * (1.0 - psi.expectation(link_operator(L, L.link_between(s[0], s[1]))));
            EXPECT_NEAR(*run_density(run, k, std::nullopt), n, 1e-9) << to_string(v) << " dimer " << k;
        }
    }
}

TEST(Exchange, VariantNamesRoundTrip) {
    for (auto v : {ExchangeVariant::HopAndReturn, ExchangeVariant::FullExchange, ExchangeVariant::Control0,
                   ExchangeVariant::Control2})
        EXPECT_EQ(exchange_variant_from_string(to_string(v)), v);
    EXPECT_THROW(exchange_variant_from_string("braid"), SchemaError);
}

// ---------------------------------------------------------------------------
// Fermi-Hubbard

TEST(Hubbard, LayoutSplitsTheStrip) {
    const HubbardLayout lay = hubbard_layout(true);
    EXPECT_EQ(lay.up.size(), 4u);
    EXPECT_EQ(lay.down.size(), 4u);
    EXPECT_FALSE(lay.cut_links.empty());
    int sum = 0;
    for (int s : lay.stagger) sum += s;
    EXPECT_EQ(sum, 0);
}

TEST(Hubbard, ZeroRoundsIsPerfectlyOrdered) {
    HubbardSpec spec;
    spec.rounds = 0;
    EXPECT_NEAR(hubbard_free(spec).at(0), 1.0, 1e-12);
    spec.u_angle = 0.5;
    EXPECT_NEAR(hubbard_interacting(spec).at(0), 1.0, 1e-12);
}

TEST(Hubbard, OracleMatchesFreeEngineAtZeroU) {
    HubbardSpec spec;
    spec.rounds = 5;
    const auto free = hubbard_free(spec);
    const auto dense = hubbard_interacting(spec);
    ASSERT_EQ(free.size(), dense.size());
    for (std::size_t r = 0; r < free.size(); ++r) EXPECT_NEAR(free[r], dense[r], 1e-8) << "round " << r;
    EXPECT_LT(free.back(), 0.9);
}

TEST(Hubbard, InteractionSuppressesDecayNonMonotonically) {
    HubbardSpec spec;
    spec.rounds = 4;
    std::vector<double> finals;
    for (double u : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        spec.u_angle = u;
        finals.push_back(hubbard(spec).back());
    }
    EXPECT_GT(finals[1], finals[0]);
    EXPECT_GT(finals[2], finals[1]);
    bool rises = false, falls = false;
    for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
        rises |= finals[k + 1] > finals[k] + 1e-6;
        falls |= finals[k + 1] < finals[k] - 1e-6;
    }
    EXPECT_TRUE(rises && falls);
}

TEST(Hubbard, FullSizeInteractingIsRefused) {
    HubbardSpec spec;
    spec.small = false;
    spec.u_angle = 0.5;
    EXPECT_THROW(hubbard(spec), TooLarge);
    spec.u_angle = 0.0;
    EXPECT_EQ(hubbard(spec).size(), static_cast<std::size_t>(spec.rounds + 1));
}

TEST(Hubbard, FreePathRejectsInteraction) {
    HubbardSpec spec;
    spec.u_angle = 0.1;
    EXPECT_THROW(hubbard_free(spec), SchemaError);
}

// ---------------------------------------------------------------------------
// Gate identities

TEST(GateIdentities, HoldForRandomAngles) {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> theta(-2.0, 2.0), phi(-std::numbers::pi, std::numbers::pi);
    for (int i = 0; i < 100; ++i) {
        EXPECT_LT(zz_from_cp(theta(gen)).max_deviation, 1e-12);
        EXPECT_LT(string_propagation(theta(gen), phi(gen)).max_deviation, 1e-12);
    }
    EXPECT_FALSE(zz_from_cp(0.125).sequence.empty());
}
