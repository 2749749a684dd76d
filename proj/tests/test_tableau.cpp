#include <gtest/gtest.h>

#include "kfs/pauli.hpp"
#include "kfs/rng.hpp"
#include "kfs/tableau.hpp"

using namespace kfs;

namespace {
PauliString P(std::initializer_list<PauliString::Term> t, int phase = 0) { return PauliString::from_terms(t, phase); }
}  // namespace

TEST(Tableau, BellPair) {
    CliffordState s(2);
    s.h(0);
    s.cx(0, 1);
    EXPECT_EQ(s.peek(P({{0, Pauli::X}, {1, Pauli::X}})), 1);
    EXPECT_EQ(s.peek(P({{0, Pauli::Z}, {1, Pauli::Z}})), 1);
    EXPECT_EQ(s.peek(P({{0, Pauli::Y}, {1, Pauli::Y}})), -1);
    EXPECT_EQ(s.peek(P({{0, Pauli::Z}})), 0);
}

TEST(Tableau, PhaseGates) {
    CliffordState s(1);
    s.h(0);
    s.s(0);
    EXPECT_EQ(s.peek(P({{0, Pauli::Y}})), 1);
    s.sdg(0);
    EXPECT_EQ(s.peek(P({{0, Pauli::X}})), 1);
    s.z(0);
    EXPECT_EQ(s.peek(P({{0, Pauli::X}})), -1);
}

TEST(Tableau, ControlledY) {
    CliffordState s(2);
    s.x(0);
    s.cy(0, 1);
    // Y|0> = i|1>
    EXPECT_EQ(s.peek(P({{1, Pauli::Z}})), -1);
    CliffordState t(2);
    t.h(0);
    t.cy(0, 1);
    EXPECT_EQ(t.peek(P({{0, Pauli::X}, {1, Pauli::Y}})), 1);
}

TEST(Tableau, CzSymmetric) {
    CliffordState s(2);
    s.h(0);
    s.h(1);
    s.cz(0, 1);
    EXPECT_EQ(s.peek(P({{0, Pauli::X}, {1, Pauli::Z}})), 1);
    EXPECT_EQ(s.peek(P({{0, Pauli::Z}, {1, Pauli::X}})), 1);
}

TEST(Tableau, ForcedMeasurementCollapses) {
    CliffordState s(3);
    const auto xx = P({{0, Pauli::X}, {1, Pauli::X}});
    EXPECT_EQ(s.measure_forced(xx, -1), -1);
    EXPECT_EQ(s.peek(xx), -1);
    EXPECT_EQ(s.peek(P({{0, Pauli::Z}, {1, Pauli::Z}})), 1);
    EXPECT_EQ(s.peek(-P({{0, Pauli::Y}, {1, Pauli::Y}})), -1);
}

TEST(Tableau, RandomMeasurementsAreRepeatable) {
    Rng rng(7);
    CliffordState s(4);
    for (int q = 0; q < 4; ++q) s.h(q);
    for (int q = 0; q < 4; ++q) {
        const auto z = P({{q, Pauli::Z}});
        const int m = s.measure(z, rng);
        EXPECT_EQ(s.measure(z, rng), m);
    }
}

TEST(Tableau, ForcedOutcomeRespectsPhase) {
    CliffordState s(2);
    const auto minus_yx = -P({{0, Pauli::Y}, {1, Pauli::X}});
    EXPECT_EQ(s.measure_forced(minus_yx, 1), 1);
    EXPECT_EQ(s.peek(minus_yx), 1);
    EXPECT_EQ(s.peek(P({{0, Pauli::Y}, {1, Pauli::X}})), -1);
}
