#include <gtest/gtest.h>

#include "kfs/errors.hpp"
#include "kfs/oracle.hpp"

using namespace kfs;

namespace {
PauliString P(std::initializer_list<PauliString::Term> t, int phase = 0) { return PauliString::from_terms(t, phase); }
}  // namespace

TEST(Oracle, CapEnforced) { EXPECT_THROW(DenseState(23), TooLarge); }

TEST(Oracle, CpOneIsCz) {
    DenseState a(2), b(2);
    for (DenseState* s : {&a, &b}) {
        s->h(0);
        s->h(1);
        s->pauli_rotation(P({{0, Pauli::Y}}), 0.3);
    }
    a.cp(0, 1, 1.0);
    b.cz(0, 1);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(a.amplitudes()[i] - b.amplitudes()[i]), 0.0, 1e-15);
}

TEST(Oracle, YActsAsIXZ) {
    DenseState s(1);
    s.y(0);
    EXPECT_NEAR(s.amplitudes()[1].imag(), 1.0, 1e-15);
}

TEST(Oracle, StabilizerEigenstates) {
    DenseState s(3);
    s.h(0);
    s.cx(0, 1);
    s.cy(1, 2);
    Rng rng(1);
    EXPECT_NEAR(s.expectation(P({{0, Pauli::X}, {1, Pauli::X}, {2, Pauli::Y}})), 1.0, 1e-12);
    EXPECT_NEAR(s.expectation(P({{0, Pauli::Z}, {1, Pauli::Z}})), 1.0, 1e-12);
    const int m = s.measure(P({{0, Pauli::Z}}), rng);
    EXPECT_EQ(s.measure(P({{0, Pauli::Z}}), rng), m);
    EXPECT_NEAR(s.norm(), 1.0, 1e-12);
}

TEST(Oracle, PauliRotationIsUnitary) {
    DenseState s(4);
    for (int q = 0; q < 4; ++q) s.h(q);
    s.pauli_rotation(P({{0, Pauli::X}, {2, Pauli::Z}, {3, Pauli::Y}}), 0.77);
    EXPECT_NEAR(s.norm(), 1.0, 1e-12);
    // exp(i pi/2 P) = i P
    DenseState a(2), b(2);
    a.h(0);
    b.h(0);
    a.pauli_rotation(P({{0, Pauli::Z}, {1, Pauli::X}}), M_PI / 2);
    b.apply_pauli(P({{0, Pauli::Z}, {1, Pauli::X}}, 1));
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(a.amplitudes()[i] - b.amplitudes()[i]), 0.0, 1e-12);
}
