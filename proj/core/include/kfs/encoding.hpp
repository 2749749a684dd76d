#pragma once

#include <optional>
#include <vector>

#include "kfs/lattice.hpp"
#include "kfs/pauli.hpp"

namespace kfs {

// i^phase * c_{idx[0]} c_{idx[1]} ... with idx strictly increasing.
struct MajoranaMonomial {
    int phase = 0;
    std::vector<int> idx;

    static MajoranaMonomial bilinear(int a, int b);  // i c_a c_b
    MajoranaMonomial operator*(const MajoranaMonomial& rhs) const;
    bool is_scalar() const { return idx.empty(); }
};

// Local fermion encoding of the honeycomb spin model in a fixed flux sector.
//
// Majorana indices: [0, N) are the per-site c_s; [N, M) are extra Majoranas
// b_{s,t}, one for every link type t that site s lacks. The dictionary is
//   K_l       = s_l * i c_a c_b        (link l = (a, b), a < b)
//   sigma^t_s = i c_s b_{s,t}          (missing type t at s)
// with link signs s_l solved so that every hexagon and every winding loop
// evaluates to the requested sector values. ZZ link signs are held at +1
// whenever the sector allows it, so the vacuum has i<c_a c_b> = +1 on ZZ.
class Encoding {
public:
    // Empty vectors mean "all +1". Throws InvalidPattern when the plaquette
    // pattern is incompatible with the loop values.
    explicit Encoding(const Lattice& lattice, std::vector<int> flux = {}, std::vector<int> loops = {});

    const Lattice& lattice() const { return *lattice_; }
    int num_sites() const { return lattice_->num_sites(); }
    int num_majoranas() const { return num_sites() + static_cast<int>(extra_site_.size()); }
    bool is_extra(int m) const { return m >= num_sites(); }
    int site_of(int m) const;
    LinkType extra_type(int m) const;
    // Extra Majorana at site s of missing type t, or -1.
    int extra_at(int s, LinkType t) const;

    const std::vector<int>& link_signs() const { return link_sign_; }
    const std::vector<int>& flux() const { return flux_; }
    const std::vector<int>& loop_values() const { return loops_; }
    const JwPath& path() const { return path_; }
    const ComplexFermionSites& fermions() const { return fermions_; }

    // Hermitian Pauli form of i c_x c_y (x != y), built along the JW path.
    PauliString bilinear(int x, int y) const;
    // Same operator routed along a shortest lattice path instead.
    PauliString bilinear_short(int x, int y) const;
    // Data-site Majoranas only: product of link operators along the JW path.
    PauliString majorana_string(int site_i, int site_j) const { return bilinear(site_i, site_j); }
    // Minimal-weight string that creates (or annihilates) one fermion on
    // each of two ZZ dimers. Returns the bilinear indices through out-params.
    PauliString pair_creation_string(int pair_a, int pair_b, int* maj_x = nullptr, int* maj_y = nullptr) const;

    // Pauli form of the number-conserving sigma generator on an extra Majorana.
    PauliString extra_generator(int m) const;

    // Writes P = sign * i^{k/2} c_{m1} ... c_{mk} (m sorted) inside the sector.
    struct Decomposition {
        std::vector<int> majoranas;
        int sign = 1;
    };
    std::optional<Decomposition> decompose(const PauliString& p) const;

    // Stabilizers of the vacuum, with target eigenvalues; later entries may
    // be dependent on earlier ones.
    struct Stabilizer {
        PauliString op;
        int value = 1;
        bool mandatory = true;
    };
    std::vector<Stabilizer> vacuum_stabilizers() const;

    // Gauge operators (hexagons then winding loops) and their values.
    const std::vector<PauliString>& gauge_operators() const { return gauge_ops_; }
    const std::vector<int>& gauge_values() const { return gauge_vals_; }

private:
    const Lattice* lattice_;
    std::vector<int> flux_, loops_;
    std::vector<int> link_sign_;
    std::vector<int> extra_site_;
    std::vector<LinkType> extra_type_;
    std::vector<std::array<int, 3>> extra_of_site_;
    JwPath path_;
    std::vector<int> path_pos_;
    ComplexFermionSites fermions_;
    std::vector<PauliString> gauge_ops_;
    std::vector<int> gauge_vals_;

    struct Walk {
        PauliString pauli;
        MajoranaMonomial mono;
    };
    Walk walk_sites(const std::vector<int>& sites, bool use_signs) const;
    PauliString finish_bilinear(int x, int y, const std::vector<int>& site_path) const;
    std::vector<int> shortest_site_path(int from, int to) const;
    std::optional<int> gauge_value(const PauliString& g) const;
    void solve_link_signs();
};

}  // namespace kfs
