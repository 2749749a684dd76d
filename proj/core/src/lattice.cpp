#include "kfs/lattice.hpp"

#include <algorithm>
#include <functional>

#include "kfs/errors.hpp"

namespace kfs {

char link_letter(LinkType t) {
    switch (t) {
        case LinkType::XX: return 'X';
        case LinkType::YY: return 'Y';
        case LinkType::ZZ: return 'Z';
    }
    return '?';
}

const char* to_string(LinkType t) {
    switch (t) {
        case LinkType::XX: return "XX";
        case LinkType::YY: return "YY";
        case LinkType::ZZ: return "ZZ";
    }
    return "?";
}

const char* to_string(Boundary b) { return b == Boundary::Cylinder ? "cylinder" : "open"; }

int Lattice::index_of(int row, int col) const {
    if (col < 0 || col >= scols_) return -1;
    if (boundary_ == Boundary::Cylinder) {
        row = ((row % srows_) + srows_) % srows_;
    } else if (row < 0 || row >= srows_) {
        return -1;
    }
    return grid_[static_cast<std::size_t>(row * scols_ + col)];
}

int Lattice::link_at(int s, LinkType t) const {
    return link_of_[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
}

int Lattice::link_between(int a, int b) const {
    for (int t = 0; t < 3; ++t) {
        const int l = link_of_[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)];
        if (l < 0) continue;
        const Link& L = links_[static_cast<std::size_t>(l)];
        if ((L.a == a && L.b == b) || (L.a == b && L.b == a)) return l;
    }
    return -1;
}

int Lattice::plaquette_index(int row, int col) const {
    if (col < 0 || col >= pcols_) return -1;
    if (boundary_ == Boundary::Cylinder) {
        row = ((row % prows_) + prows_) % prows_;
    } else if (row < 0 || row >= prows_) {
        return -1;
    }
    return row * pcols_ + col;
}

bool Lattice::contains_site(int plaquette, int s) const {
    const auto& p = plaquettes_[static_cast<std::size_t>(plaquette)];
    return std::find(p.sites.begin(), p.sites.end(), s) != p.sites.end();
}

std::vector<std::vector<int>> Lattice::winding_loops() const {
    std::vector<std::vector<int>> loops;
    if (boundary_ != Boundary::Cylinder) return loops;
    for (int k = 0; 2 * k + 1 < scols_; ++k) {
        std::vector<int> loop;
        for (int r = 0; r < srows_; ++r) {
            loop.push_back(index_of(r, 2 * k));
            loop.push_back(index_of(r, 2 * k + 1));
        }
        std::sort(loop.begin(), loop.end());
        loops.push_back(std::move(loop));
    }
    return loops;
}

namespace {

std::array<std::pair<int, int>, 6> hexagon_coords(int i, int j) {
    return {{{i, 2 * j + 2}, {i, 2 * j + 3}, {i + 1, 2 * j + 2},
             {i + 1, 2 * j + 1}, {i + 1, 2 * j}, {i, 2 * j + 1}}};
}

}  // namespace

Lattice build_lattice(int rows_of_plaquettes, int cols, Boundary boundary) {
    if (rows_of_plaquettes < 1 || cols < 1)
        throw InvalidGeometry("lattice needs at least one plaquette row and column");
    if (boundary == Boundary::Cylinder && (rows_of_plaquettes < 2 || rows_of_plaquettes % 2 != 0))
        throw InvalidGeometry("cylinder wrap length must be even and at least 2, got " +
                              std::to_string(rows_of_plaquettes));

    Lattice L;
    L.prows_ = rows_of_plaquettes;
    L.pcols_ = cols;
    L.boundary_ = boundary;
    L.srows_ = boundary == Boundary::Cylinder ? rows_of_plaquettes : rows_of_plaquettes + 1;
    L.scols_ = 2 * cols + 2;
    const bool periodic = boundary == Boundary::Cylinder;
    auto wrap = [&](int r) { return periodic ? ((r % L.srows_) + L.srows_) % L.srows_ : r; };

    std::vector<char> present(static_cast<std::size_t>(L.srows_ * L.scols_), periodic ? 1 : 0);
    if (!periodic) {
        for (int i = 0; i < L.prows_; ++i)
            for (int j = 0; j < L.pcols_; ++j)
                for (auto [r, c] : hexagon_coords(i, j))
                    present[static_cast<std::size_t>(r * L.scols_ + c)] = 1;
    }

    L.grid_.assign(present.size(), -1);
    for (int r = 0; r < L.srows_; ++r) {
        for (int c = 0; c < L.scols_; ++c) {
            if (!present[static_cast<std::size_t>(r * L.scols_ + c)]) continue;
            L.grid_[static_cast<std::size_t>(r * L.scols_ + c)] = static_cast<int>(L.sites_.size());
            L.sites_.push_back({r, c, c % 2 == 0 ? Sublattice::Even : Sublattice::Odd});
        }
    }

    L.link_of_.assign(L.sites_.size(), {-1, -1, -1});
    auto add_link = [&](int s, int t, LinkType type) {
        if (s < 0 || t < 0) return;
        Link l{std::min(s, t), std::max(s, t), type};
        for (int v : {l.a, l.b}) {
            auto& slot = L.link_of_[static_cast<std::size_t>(v)][static_cast<std::size_t>(type)];
            if (slot >= 0) throw InvalidGeometry("site carries two links of the same type");
            slot = static_cast<int>(L.links_.size());
        }
        L.links_.push_back(l);
    };
    for (int r = 0; r < L.srows_; ++r) {
        for (int c = 0; c + 1 < L.scols_; ++c)
            add_link(L.index_of(r, c), L.index_of(r, c + 1), c % 2 == 0 ? LinkType::YY : LinkType::ZZ);
        for (int c = 1; c < L.scols_; c += 2) {
            const int below = r + 1;
            if (!periodic && below >= L.srows_) continue;
            add_link(L.index_of(r, c), L.index_of(wrap(below), c - 1), LinkType::XX);
        }
    }

    L.columns_.assign(static_cast<std::size_t>(L.pcols_), {});
    for (int i = 0; i < L.prows_; ++i) {
        for (int j = 0; j < L.pcols_; ++j) {
            Plaquette p;
            p.row = i;
            p.col = j;
            const auto coords = hexagon_coords(i, j);
            for (std::size_t k = 0; k < 6; ++k) p.sites[k] = L.index_of(wrap(coords[k].first), coords[k].second);
            for (std::size_t k = 0; k < 6; ++k) {
                const int prev = p.sites[(k + 5) % 6], cur = p.sites[k], next = p.sites[(k + 1) % 6];
                const int l1 = L.link_between(prev, cur), l2 = L.link_between(cur, next);
                if (l1 < 0 || l2 < 0) throw InvalidGeometry("hexagon edge missing");
                const int inner = static_cast<int>(L.links_[static_cast<std::size_t>(l1)].type) +
                                  static_cast<int>(L.links_[static_cast<std::size_t>(l2)].type);
                p.letters[k] = link_letter(static_cast<LinkType>(3 - inner));
            }
            L.columns_[static_cast<std::size_t>(j)].push_back(static_cast<int>(L.plaquettes_.size()));
            L.plaquettes_.push_back(p);
            L.ancillas_.push_back({i, j, Sublattice::Even});
        }
    }

    // Central ceil(3/4) of the 2*cols interior site columns.
    const int interior = 2 * L.pcols_;
    const int keep = (3 * interior + 3) / 4;
    L.bulk_lo_ = 1 + (interior - keep) / 2;
    L.bulk_hi_ = L.bulk_lo_ + keep - 1;
    for (int s = 0; s < L.num_sites(); ++s) {
        const int c = L.sites_[static_cast<std::size_t>(s)].col;
        if (c >= L.bulk_lo_ && c <= L.bulk_hi_) L.bulk_.push_back(s);
    }
    return L;
}

Lattice default_lattice() { return build_lattice(4, 8, Boundary::Cylinder); }

Lattice single_plaquette() { return build_lattice(1, 1, Boundary::Open); }

int ComplexFermionSites::pair_at(int r, int j) const {
    for (std::size_t k = 0; k < grid_coords.size(); ++k)
        if (grid_coords[k].first == r && grid_coords[k].second == j) return static_cast<int>(k);
    return -1;
}

ComplexFermionSites complex_fermion_sites(const Lattice& lattice) {
    ComplexFermionSites out;
    out.grid_rows = lattice.site_rows();
    out.grid_cols = lattice.plaquette_cols();
    for (int r = 0; r < lattice.site_rows(); ++r) {
        for (int j = 0; j < lattice.plaquette_cols(); ++j) {
            const int a = lattice.index_of(r, 2 * j + 1), b = lattice.index_of(r, 2 * j + 2);
            if (a < 0 || b < 0) continue;
            out.pairs.emplace_back(a, b);
            out.grid_coords.emplace_back(r, j);
        }
    }
    for (int s = 0; s < lattice.num_sites(); ++s)
        if (lattice.link_at(s, LinkType::ZZ) < 0) out.unpaired.push_back(s);
    return out;
}

namespace {

JwPath ring_path(const Lattice& L) {
    JwPath path;
    const int R = L.site_rows();
    int entry_row = 0;
    for (int k = 0; 2 * k + 1 < L.site_cols(); ++k) {
        for (int step = 0; step < 2 * R; ++step) {
            const int r = entry_row + step / 2;
            path.order.push_back(L.index_of(r, 2 * k + (step % 2)));
        }
        entry_row -= 1;
    }
    for (std::size_t k = 0; k + 1 < path.order.size(); ++k) {
        const int l = L.link_between(path.order[k], path.order[k + 1]);
        if (l < 0) throw NoPath("ring walk broke at step " + std::to_string(k));
        path.links.push_back(l);
    }
    return path;
}

JwPath dfs_path(const Lattice& L) {
    const int n = L.num_sites();
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> order{0};
    seen[0] = 1;
    long budget = 2'000'000;
    std::function<bool(int)> extend = [&](int v) -> bool {
        if (static_cast<int>(order.size()) == n) return true;
        if (--budget < 0) return false;
        for (int t = 0; t < 3; ++t) {
            const int l = L.link_at(v, static_cast<LinkType>(t));
            if (l < 0) continue;
            const Link& lk = L.links()[static_cast<std::size_t>(l)];
            const int w = lk.a == v ? lk.b : lk.a;
            if (seen[static_cast<std::size_t>(w)]) continue;
            seen[static_cast<std::size_t>(w)] = 1;
            order.push_back(w);
            if (extend(w)) return true;
            order.pop_back();
            seen[static_cast<std::size_t>(w)] = 0;
        }
        return false;
    };
    if (!extend(0)) throw NoPath("no Hamiltonian path through the open lattice");
    JwPath path;
    path.order = order;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) path.links.push_back(L.link_between(order[k], order[k + 1]));
    return path;
}

}  // namespace

JwPath jw_path(const Lattice& lattice) {
    return lattice.boundary() == Boundary::Cylinder ? ring_path(lattice) : dfs_path(lattice);
}

}  // namespace kfs
