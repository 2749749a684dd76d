#include <gtest/gtest.h>

#include <set>

#include "kfs/errors.hpp"
#include "kfs/lattice.hpp"

using namespace kfs;

TEST(Lattice, DefaultCounts) {
    const Lattice L = default_lattice();
    EXPECT_EQ(L.num_sites(), 72);
    EXPECT_EQ(L.ancilla_sites().size(), 32u);
    EXPECT_EQ(L.plaquettes().size(), 32u);
    EXPECT_EQ(L.site_cols(), 18);
    EXPECT_EQ(L.winding_loops().size(), 9u);
}

TEST(Lattice, LinkTypesFollowColumns) {
    const Lattice L = default_lattice();
    for (const Link& l : L.links()) {
        const Site& a = L.site(l.a);
        const Site& b = L.site(l.b);
        EXPECT_LT(l.a, l.b);
        if (a.row == b.row && std::abs(a.col - b.col) == 1) {
            const int c = std::min(a.col, b.col);
            EXPECT_EQ(l.type, c % 2 == 0 ? LinkType::YY : LinkType::ZZ);
        } else {
            EXPECT_EQ(l.type, LinkType::XX);
        }
    }
}

TEST(Lattice, EverySiteHasAtMostOneLinkPerType) {
    const Lattice L = default_lattice();
    std::vector<std::array<int, 3>> seen(72, {0, 0, 0});
    for (const Link& l : L.links()) {
        ++seen[l.a][static_cast<int>(l.type)];
        ++seen[l.b][static_cast<int>(l.type)];
    }
    for (const auto& s : seen)
        for (int c : s) EXPECT_LE(c, 1);
}

TEST(Lattice, PlaquetteLetters) {
    const Lattice L = default_lattice();
    for (const auto& p : L.plaquettes()) {
        const std::string letters(p.letters.begin(), p.letters.end());
        EXPECT_EQ(letters, "XZYXZY");
    }
}

TEST(Lattice, CylinderNeedsEvenRows) {
    EXPECT_THROW(build_lattice(3, 4, Boundary::Cylinder), InvalidGeometry);
    EXPECT_THROW(build_lattice(0, 4, Boundary::Open), InvalidGeometry);
    EXPECT_NO_THROW(build_lattice(2, 2, Boundary::Cylinder));
}

TEST(Lattice, SinglePlaquette) {
    const Lattice L = single_plaquette();
    EXPECT_EQ(L.num_sites(), 6);
    EXPECT_EQ(L.links().size(), 6u);
    EXPECT_TRUE(L.winding_loops().empty());
}

TEST(Lattice, ComplexFermionGrid) {
    const Lattice L = default_lattice();
    const auto cf = complex_fermion_sites(L);
    EXPECT_EQ(cf.pairs.size(), 32u);
    EXPECT_EQ(cf.unpaired.size(), 8u);
    EXPECT_EQ(cf.grid_rows, 4);
    EXPECT_EQ(cf.grid_cols, 8);
}

TEST(Lattice, JwPathVisitsAllSitesOnce) {
    for (const Lattice& L : {default_lattice(), single_plaquette(), build_lattice(1, 3, Boundary::Open), build_lattice(2, 2, Boundary::Cylinder)}) {
        const JwPath p = jw_path(L);
        ASSERT_EQ(static_cast<int>(p.order.size()), L.num_sites());
        EXPECT_EQ(std::set<int>(p.order.begin(), p.order.end()).size(), p.order.size());
        ASSERT_EQ(p.links.size() + 1, p.order.size());
        for (std::size_t k = 0; k < p.links.size(); ++k)
            EXPECT_EQ(L.link_between(p.order[k], p.order[k + 1]), p.links[k]);
    }
}

TEST(Lattice, BulkColumns) {
    const Lattice L = default_lattice();
    EXPECT_EQ(L.bulk_col_lo(), 3);
    EXPECT_EQ(L.bulk_col_hi(), 14);
}
