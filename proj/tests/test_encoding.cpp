#include <gtest/gtest.h>

#include "kfs/encoding.hpp"
#include "kfs/errors.hpp"
#include "kfs/rng.hpp"
#include "kfs/tableau.hpp"

using namespace kfs;

namespace {

CliffordState vacuum_tableau(const Encoding& enc) {
    CliffordState s(enc.num_sites());
    for (const auto& st : enc.vacuum_stabilizers()) s.measure_forced(st.op, st.value);
    return s;
}

}  // namespace

TEST(Monomial, SortingSigns) {
    const auto ab = MajoranaMonomial::bilinear(0, 1);
    const auto ba = MajoranaMonomial::bilinear(1, 0);
    EXPECT_EQ((ab * ba).idx.size(), 0u);
    EXPECT_EQ((ab * ba).phase, 2);  // (i c0 c1)(i c1 c0) = -1
    EXPECT_EQ((ab * ab).phase, 0);  // (i c0 c1)^2 = 1
    const auto m = MajoranaMonomial::bilinear(1, 2) * MajoranaMonomial::bilinear(0, 1);
    // (i c1 c2)(i c0 c1) = -c1 c2 c0 c1 = +c0 c2
    EXPECT_EQ(m.idx, (std::vector<int>{0, 2}));
    EXPECT_EQ(m.phase, 0);
}

TEST(Encoding, ExtraMajoranaCounts) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    EXPECT_EQ(enc.num_majoranas(), 80);
    const Lattice S = single_plaquette();
    EXPECT_EQ(Encoding(S).num_majoranas(), 12);
}

TEST(Encoding, TrivialSectorKeepsZZSignsPositive) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    for (std::size_t l = 0; l < L.links().size(); ++l)
        if (L.links()[l].type == LinkType::ZZ) EXPECT_EQ(enc.link_signs()[l], 1);
}

TEST(Encoding, BilinearAlgebra) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    Rng rng(3);
    for (int t = 0; t < 200; ++t) {
        const int a = rng.below(80);
        int b = rng.below(80), c = rng.below(80);
        if (a == b || b == c || a == c) continue;
        const auto ab = enc.bilinear(a, b);
        EXPECT_TRUE(ab.is_hermitian());
        EXPECT_EQ(enc.bilinear(b, a), -ab);
        EXPECT_FALSE(ab.commutes(enc.bilinear(b, c)));
        // Different routes agree only inside the sector.
        const auto d = enc.decompose(enc.bilinear_short(a, b));
        ASSERT_TRUE(d.has_value());
        EXPECT_EQ(d->majoranas, (std::vector<int>{std::min(a, b), std::max(a, b)}));
        EXPECT_EQ(d->sign, a < b ? 1 : -1);
    }
}

TEST(Encoding, BilinearProductRule) {
    // (i c_a c_b)(i c_b c_c) = -c_a c_c = i (i c_a c_c)
    const Lattice L = default_lattice();
    const Encoding enc(L);
    const std::vector<std::array<int, 3>> triples{{0, 5, 9}, {3, 40, 71}, {72, 10, 79}, {15, 75, 2}};
    for (const auto& [a, b, c] : triples) EXPECT_EQ(enc.bilinear(a, b) * enc.bilinear(b, c), enc.bilinear(a, c).times_i(1));
}

TEST(Encoding, DecomposeBilinearAndGauge) {
    const Lattice L = default_lattice();
    std::vector<int> flux(32, 1);
    flux[L.plaquette_index(1, 2)] = -1;
    flux[L.plaquette_index(2, 2)] = -1;
    const Encoding enc(L, flux);
    for (auto [x, y] : std::vector<std::pair<int, int>>{{0, 1}, {4, 33}, {12, 77}}) {
        const auto d = enc.decompose(enc.bilinear(x, y));
        ASSERT_TRUE(d.has_value());
        EXPECT_EQ(d->majoranas, (std::vector<int>{x, y}));
        EXPECT_EQ(d->sign, 1);
    }
    const auto w = enc.decompose(plaquette_operator(L, L.plaquette_index(1, 2)));
    ASSERT_TRUE(w.has_value());
    EXPECT_TRUE(w->majoranas.empty());
    EXPECT_EQ(w->sign, -1);
    const auto q = enc.decompose(enc.bilinear(3, 8) * enc.bilinear(20, 50));
    ASSERT_TRUE(q.has_value());
    EXPECT_EQ(q->majoranas, (std::vector<int>{3, 8, 20, 50}));
    EXPECT_EQ(q->sign, 1);
}

TEST(Encoding, VacuumZZBilinearsArePositive) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    const CliffordState s = vacuum_tableau(enc);
    for (const auto& [a, b] : enc.fermions().pairs) EXPECT_EQ(s.peek(enc.bilinear(std::min(a, b), std::max(a, b))), 1);
    for (std::size_t p = 0; p < L.plaquettes().size(); ++p)
        EXPECT_EQ(s.peek(plaquette_operator(L, static_cast<int>(p))), 1);
}

TEST(Encoding, VacuumIsPureGaussian) {
    for (const Lattice& L : {default_lattice(), single_plaquette()}) {
        const Encoding enc(L);
        const CliffordState s = vacuum_tableau(enc);
        const int m = enc.num_majoranas();
        // A pure Gaussian stabilizer state has exactly one nonzero per row.
        for (int x = 0; x < m; ++x) {
            int nonzero = 0;
            for (int y = 0; y < m; ++y)
                if (x != y && s.peek(enc.bilinear(x, y)) != 0) ++nonzero;
            EXPECT_EQ(nonzero, 1) << "row " << x;
        }
    }
}

TEST(Encoding, PairCreationWeights) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    const auto& cf = enc.fermions();
    const auto horiz = enc.pair_creation_string(cf.pair_at(1, 3), cf.pair_at(1, 4));
    EXPECT_EQ(horiz.weight(), 2);
    const auto vert = enc.pair_creation_string(cf.pair_at(1, 3), cf.pair_at(2, 3));
    EXPECT_EQ(vert.weight(), 3);
}

TEST(Encoding, InconsistentSectorThrows) {
    const Lattice L = default_lattice();
    // With all loops at +1, flipped plaquettes must pair up within a column.
    std::vector<int> flux(L.plaquettes().size(), 1);
    flux[L.plaquette_index(0, 3)] = -1;
    EXPECT_THROW(Encoding(L, flux), InvalidPattern);
    flux[L.plaquette_index(2, 3)] = -1;
    EXPECT_NO_THROW(Encoding(L, flux));
    const Lattice S = single_plaquette();
    EXPECT_NO_THROW(Encoding(S, {-1}));
}
