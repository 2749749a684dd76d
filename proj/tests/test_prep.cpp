#include <gtest/gtest.h>

#include <chrono>

#include "kfs/errors.hpp"
#include "kfs/prep.hpp"

using namespace kfs;

namespace {

std::vector<int> all_plus(const Lattice& L) { return std::vector<int>(L.plaquettes().size(), 1); }

void expect_ideal(const Lattice& L, const PrepOutcome& out, const std::vector<int>& target) {
    for (std::size_t p = 0; p < L.plaquettes().size(); ++p)
        EXPECT_EQ(out.state.peek(plaquette_operator(L, static_cast<int>(p))), target[p]) << "plaquette " << p;
    for (std::size_t l = 0; l < L.links().size(); ++l)
        if (L.links()[l].type == LinkType::ZZ) EXPECT_EQ(out.state.peek(link_operator(L, static_cast<int>(l))), 1);
    for (std::size_t k = 0; k < L.winding_loops().size(); ++k)
        EXPECT_EQ(out.state.peek(winding_loop_operator(L, static_cast<int>(k))), 1);
    EXPECT_EQ(out.column_violations(), 0);
    EXPECT_TRUE(out.residual_defects.empty());
}

}  // namespace

class PrepMethods : public ::testing::TestWithParam<PrepMethod> {};

TEST_P(PrepMethods, NoiselessDefaultLattice) {
    const Lattice L = default_lattice();
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        Rng rng(seed);
        const auto out = run_prep_circuit(L, GetParam(), NoiseModel::noiseless(), all_plus(L), rng);
        expect_ideal(L, out, all_plus(L));
    }
}

TEST_P(PrepMethods, NoiselessOpenLattices) {
    for (const Lattice& L : {single_plaquette(), build_lattice(2, 3, Boundary::Open)}) {
        Rng rng(11);
        const auto out = run_prep_circuit(L, GetParam(), NoiseModel::noiseless(), all_plus(L), rng);
        expect_ideal(L, out, all_plus(L));
    }
}

TEST_P(PrepMethods, TargetPatternReached) {
    const Lattice L = default_lattice();
    auto target = all_plus(L);
    target[static_cast<std::size_t>(L.plaquette_index(0, 2))] = -1;
    target[static_cast<std::size_t>(L.plaquette_index(2, 2))] = -1;
    target[static_cast<std::size_t>(L.plaquette_index(1, 5))] = -1;
    target[static_cast<std::size_t>(L.plaquette_index(2, 5))] = -1;
    Rng rng(5);
    const auto out = run_prep_circuit(L, GetParam(), NoiseModel::noiseless(), target, rng);
    for (std::size_t p = 0; p < target.size(); ++p)
        EXPECT_EQ(out.state.peek(plaquette_operator(L, static_cast<int>(p))), target[p]);
}

INSTANTIATE_TEST_SUITE_P(All, PrepMethods,
                         ::testing::Values(PrepMethod::ZXXZ32, PrepMethod::ZXXZ16, PrepMethod::Hexagons));

TEST(Prep, OddColumnTargetRejected) {
    const Lattice L = default_lattice();
    auto target = all_plus(L);
    target[0] = -1;
    Rng rng(1);
    EXPECT_THROW(run_prep_circuit(L, PrepMethod::ZXXZ32, NoiseModel::noiseless(), target, rng), InvalidPattern);
}

TEST(Decoder, EmptyForTrivialOutcomes) {
    const Lattice L = default_lattice();
    Rng rng(2);
    EXPECT_TRUE(feedforward_decode(L, all_plus(L), all_plus(L), rng).corrections.empty());
}

TEST(Decoder, ExhaustiveSingleColumn) {
    const Lattice L = build_lattice(4, 1, Boundary::Cylinder);
    for (int mask = 0; mask < 16; ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) % 2) continue;
        std::vector<int> outcomes(4);
        for (int r = 0; r < 4; ++r) outcomes[static_cast<std::size_t>(L.plaquette_index(r, 0))] = (mask >> r) & 1 ? -1 : 1;
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            Rng rng(seed);
            const auto dec = feedforward_decode(L, outcomes, all_plus(L), rng);
            EXPECT_TRUE(dec.residual.empty());
            PauliString corr;
            for (int s : dec.corrections) corr *= PauliString::single(s, Pauli::Z);
            for (int p = 0; p < 4; ++p) {
                const int flipped = corr.commutes(plaquette_operator(L, p)) ? 1 : -1;
                EXPECT_EQ(outcomes[static_cast<std::size_t>(p)] * flipped, 1);
            }
        }
    }
}

TEST(Decoder, OddColumnThrowsWhenStrict) {
    const Lattice L = build_lattice(4, 1, Boundary::Cylinder);
    std::vector<int> outcomes{-1, 1, 1, 1};
    Rng rng(0);
    EXPECT_THROW(feedforward_decode(L, outcomes, all_plus(L), rng), UnpairableColumn);
    const auto dec = feedforward_decode(L, outcomes, all_plus(L), rng, false);
    EXPECT_EQ(dec.residual.size(), 1u);
}

TEST(Decoder, TwoFlipPlacementsVerifiedOnTableau) {
    // Every pair of -1 targets in a 4-plaquette column.
    const Lattice L = build_lattice(4, 2, Boundary::Cylinder);
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            auto target = all_plus(L);
            target[static_cast<std::size_t>(L.plaquette_index(a, 1))] = -1;
            target[static_cast<std::size_t>(L.plaquette_index(b, 1))] = -1;
            Rng rng(static_cast<std::uint64_t>(10 * a + b));
            const auto out = run_prep_circuit(L, PrepMethod::ZXXZ32, NoiseModel::noiseless(), target, rng);
            for (std::size_t p = 0; p < target.size(); ++p)
                EXPECT_EQ(out.state.peek(plaquette_operator(L, static_cast<int>(p))), target[p]);
        }
}

TEST(Prep, SingleReadoutFaultDetected) {
    const Lattice L = default_lattice();
    for (int p = 0; p < 32; p += 7) {
        PrepInjection inj;
        inj.before_readout.emplace_back(p, Pauli::Z);
        Rng rng(3);
        const auto out = run_prep_circuit(L, PrepMethod::ZXXZ32, NoiseModel::noiseless(), all_plus(L), rng, &inj);
        EXPECT_EQ(out.column_violations(), 1);
        EXPECT_EQ(out.residual_defects.size(), 1u);
    }
}

TEST(Prep, DepolarizedPlaquetteParity) {
    // Single-qubit depolarizing p on the ideal state: <W> = (1 - 4p/3)^6.
    const Lattice L = default_lattice();
    NoiseModel noise = NoiseModel::noiseless();
    noise.p_layer = 0.1;
    noise.loss_fraction_layer = 0.0;
    double sum = 0.0, sum2 = 0.0;
    const int shots = 400;
    for (int s = 0; s < shots; ++s) {
        Rng rng = substream(42, static_cast<std::uint64_t>(s), stream_purpose::test);
        const auto out = run_prep_circuit(L, PrepMethod::ZXXZ32, noise, all_plus(L), rng);
        for (int p = 0; p < 32; ++p) {
            const double w = out.state.peek(plaquette_operator(L, p));
            sum += w;
            sum2 += w * w;
        }
    }
    const double n = shots * 32.0;
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    EXPECT_NEAR(mean, std::pow(1.0 - 0.4 / 3.0, 6), 4 * se);
}
