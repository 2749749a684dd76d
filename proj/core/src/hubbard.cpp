#include <algorithm>
#include <cmath>
#include <numbers>

#include "kfs/errors.hpp"
#include "kfs/oracle.hpp"
#include "kfs/protocols.hpp"

namespace kfs {

namespace {

// Dimer column of a data site; unpaired edge sites take the column of their
// nearest dimer.
int dimer_column(const Lattice& L, int s) {
    const int c = L.site(s).col;
    if (c == 0) return 0;
    return std::min((c - 1) / 2, L.plaquette_cols() - 1);
}

std::vector<int> hopping_links(const HubbardLayout& lay, LinkType t) {
    std::vector<int> out;
    const auto& links = lay.lattice.links();
    for (std::size_t l = 0; l < links.size(); ++l)
        if (links[l].type == t &&
            std::find(lay.cut_links.begin(), lay.cut_links.end(), static_cast<int>(l)) == lay.cut_links.end())
            out.push_back(static_cast<int>(l));
    return out;
}

std::vector<char> initial_occupation(const HubbardLayout& lay) {
    std::vector<char> occ(complex_fermion_sites(lay.lattice).pairs.size(), 0);
    for (std::size_t i = 0; i < lay.up.size(); ++i) {
        if (lay.stagger[i] > 0) occ[static_cast<std::size_t>(lay.up[i])] = 1;
        else occ[static_cast<std::size_t>(lay.down[i])] = 1;
    }
    return occ;
}

PauliString dimer_zz(const Encoding& enc, int pair) {
    const auto s = dimer_sites(enc, pair);
    return link_operator(enc.lattice(), enc.lattice().link_between(s[0], s[1]));
}

template <class DensityFn>
double staggered_magnetization(const HubbardLayout& lay, DensityFn n) {
    double m = 0.0;
    for (std::size_t i = 0; i < lay.up.size(); ++i) m += lay.stagger[i] * (n(lay.up[i]) - n(lay.down[i]));
    return m / static_cast<double>(lay.up.size());
}

void check_spec(const HubbardSpec& spec) {
    if (spec.rounds < 0) throw SchemaError("Hubbard rounds must be non-negative");
    for (double a : {spec.theta_hop, spec.theta_z, spec.u_angle})
        if (!std::isfinite(a)) throw SchemaError("Hubbard angles must be finite");
}

}  // namespace

HubbardLayout hubbard_layout(bool small) {
    HubbardLayout lay{small ? build_lattice(1, 4, Boundary::Open) : default_lattice(), 0, {}, {}, {}, {}};
    const Lattice& L = lay.lattice;
    const ComplexFermionSites f = complex_fermion_sites(L);
    lay.half = f.grid_cols / 2;
    for (int r = 0; r < f.grid_rows; ++r)
        for (int j = 0; j < lay.half; ++j) {
            lay.up.push_back(f.pair_at(r, j));
            lay.down.push_back(f.pair_at(r, j + lay.half));
            lay.stagger.push_back(((r + j) % 2 == 0) ? 1 : -1);
        }
    const auto& links = L.links();
    for (std::size_t l = 0; l < links.size(); ++l) {
        const Link& k = links[l];
        if (k.type == LinkType::ZZ) continue;
        const bool a_up = dimer_column(L, k.a) < lay.half, b_up = dimer_column(L, k.b) < lay.half;
        const bool seam = std::abs(L.site(k.a).row - L.site(k.b).row) > 1;
        if (a_up != b_up || seam) lay.cut_links.push_back(static_cast<int>(l));
    }
    return lay;
}

std::vector<double> hubbard_free(const HubbardSpec& spec) {
    check_spec(spec);
    if (spec.u_angle != 0.0) throw SchemaError("the free-fermion Hubbard path needs u_angle = 0");
    const HubbardLayout lay = hubbard_layout(spec.small);
    const Encoding enc(lay.lattice);
    const auto occ = initial_occupation(lay);

    CorrelationMatrix g = vacuum_state(enc);
    for (std::size_t k = 0; k < occ.size(); ++k) {
        if (!occ[k]) continue;
        const auto s = dimer_sites(enc, static_cast<int>(k));
        const int lo = std::min(s[0], s[1]), hi = std::max(s[0], s[1]);
        g(lo, hi) = -g(lo, hi);
        g(hi, lo) = -g(hi, lo);
    }
    const Layer lx{hopping_links(lay, LinkType::XX), spec.theta_hop};
    const Layer ly{hopping_links(lay, LinkType::YY), spec.theta_hop};
    const Layer lz{hopping_links(lay, LinkType::ZZ), spec.theta_z};

    auto ms = [&] { return staggered_magnetization(lay, [&](int k) { return density(g, enc, k); }); };
    std::vector<double> out{ms()};
    for (int r = 0; r < spec.rounds; ++r) {
        apply_layer(g, enc, lx);
        apply_layer(g, enc, ly);
        apply_layer(g, enc, lz);
        out.push_back(ms());
    }
    return out;
}

std::vector<double> hubbard_interacting(const HubbardSpec& spec) {
    check_spec(spec);
    const HubbardLayout lay = hubbard_layout(spec.small);
    if (lay.lattice.num_sites() > DenseState::max_qubits)
        throw TooLarge("interacting Hubbard runs are limited to the oracle-sized instance");
    const Encoding enc(lay.lattice);
    const auto occ = initial_occupation(lay);

    std::vector<std::pair<PauliString, int>> stabs;
    for (const auto& st : enc.vacuum_stabilizers()) {
        int value = st.value;
        for (std::size_t k = 0; k < occ.size(); ++k)
            if (occ[k] && st.op.same_support_letters(dimer_zz(enc, static_cast<int>(k)))) value = -value;
        stabs.emplace_back(st.op, value);
    }
    DenseState psi = project_stabilizers(enc.num_sites(), stabs);

    auto layer = [&](LinkType t, double theta) {
        for (int l : hopping_links(lay, t))
            psi.pauli_rotation(link_operator(lay.lattice, l), theta * std::numbers::pi / 4.0);
    };
    std::vector<PauliString> interaction;
    for (std::size_t i = 0; i < lay.up.size(); ++i)
        interaction.push_back(dimer_zz(enc, lay.up[i]) * dimer_zz(enc, lay.down[i]));

    auto ms = [&] {
        return staggered_magnetization(lay, [&](int k) { return 0.5 * (1.0 - psi.expectation(dimer_zz(enc, k))); });
    };
    std::vector<double> out{ms()};
    for (int r = 0; r < spec.rounds; ++r) {
        layer(LinkType::XX, spec.theta_hop);
        layer(LinkType::YY, spec.theta_hop);
        layer(LinkType::ZZ, spec.theta_z);
        // The interaction commutes with the Z-basis readout, so the one that
        // would close the final round is left out.
        if (r + 1 < spec.rounds)
            for (const auto& p : interaction) psi.pauli_rotation(p, spec.u_angle * std::numbers::pi / 4.0);
        out.push_back(ms());
    }
    return out;
}

std::vector<double> hubbard(const HubbardSpec& spec) {
    return spec.u_angle == 0.0 ? hubbard_free(spec) : hubbard_interacting(spec);
}

}  // namespace kfs
