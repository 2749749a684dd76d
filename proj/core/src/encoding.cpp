#include "kfs/encoding.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>

#include "kfs/errors.hpp"

namespace kfs {

namespace {

Pauli pauli_of(LinkType t) {
    switch (t) {
        case LinkType::XX: return Pauli::X;
        case LinkType::YY: return Pauli::Y;
        case LinkType::ZZ: return Pauli::Z;
    }
    return Pauli::I;
}

// Dense GF(2) row with a companion mask recording which input rows were
// combined into it.
struct Gf2Row {
    std::vector<std::uint64_t> bits;
    std::vector<std::uint64_t> combo;
};

bool get_bit(const std::vector<std::uint64_t>& v, int k) { return (v[static_cast<std::size_t>(k >> 6)] >> (k & 63)) & 1U; }
void flip_bit(std::vector<std::uint64_t>& v, int k) { v[static_cast<std::size_t>(k >> 6)] ^= std::uint64_t{1} << (k & 63); }
void xor_into(std::vector<std::uint64_t>& dst, const std::vector<std::uint64_t>& src) {
    for (std::size_t w = 0; w < dst.size(); ++w) dst[w] ^= src[w];
}
bool any_bit(const std::vector<std::uint64_t>& v) {
    return std::any_of(v.begin(), v.end(), [](std::uint64_t w) { return w != 0; });
}

std::vector<std::uint64_t> symplectic_bits(const PauliString& p, int n) {
    std::vector<std::uint64_t> v(static_cast<std::size_t>((2 * n + 63) / 64), 0);
    for (const auto& [q, letter] : p.terms()) {
        const auto b = static_cast<unsigned>(letter);
        if (b & 1U) flip_bit(v, 2 * q);
        if (b & 2U) flip_bit(v, 2 * q + 1);
    }
    return v;
}

// Reduces `target` against an echelon basis. Returns the combination of
// original rows, or nullopt if target is outside the span.
std::optional<std::vector<std::uint64_t>> express(const std::vector<Gf2Row>& basis, const std::vector<int>& pivots,
                                                  std::vector<std::uint64_t> target, std::size_t combo_words) {
    std::vector<std::uint64_t> combo(combo_words, 0);
    for (std::size_t r = 0; r < basis.size(); ++r) {
        if (get_bit(target, pivots[r])) {
            xor_into(target, basis[r].bits);
            xor_into(combo, basis[r].combo);
        }
    }
    if (any_bit(target)) return std::nullopt;
    return combo;
}

void build_echelon(const std::vector<std::vector<std::uint64_t>>& rows, int nbits, std::vector<Gf2Row>& basis,
                   std::vector<int>& pivots) {
    const std::size_t cw = (rows.size() + 63) / 64 + 1;
    basis.clear();
    pivots.clear();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Gf2Row row{rows[i], std::vector<std::uint64_t>(cw, 0)};
        flip_bit(row.combo, static_cast<int>(i));
        for (std::size_t r = 0; r < basis.size(); ++r)
            if (get_bit(row.bits, pivots[r])) {
                xor_into(row.bits, basis[r].bits);
                xor_into(row.combo, basis[r].combo);
            }
        int piv = -1;
        for (int k = 0; k < nbits; ++k)
            if (get_bit(row.bits, k)) {
                piv = k;
                break;
            }
        if (piv < 0) continue;
        for (std::size_t r = 0; r < basis.size(); ++r)
            if (get_bit(basis[r].bits, piv)) {
                xor_into(basis[r].bits, row.bits);
                xor_into(basis[r].combo, row.combo);
            }
        basis.push_back(std::move(row));
        pivots.push_back(piv);
    }
}

}  // namespace

MajoranaMonomial MajoranaMonomial::bilinear(int a, int b) {
    MajoranaMonomial m;
    if (a == b) return m;
    m.phase = 1;
    if (a < b) {
        m.idx = {a, b};
    } else {
        m.idx = {b, a};
        m.phase = 3;
    }
    return m;
}

MajoranaMonomial MajoranaMonomial::operator*(const MajoranaMonomial& rhs) const {
    MajoranaMonomial out;
    out.phase = (phase + rhs.phase) % 4;
    std::vector<int> seq = idx;
    seq.insert(seq.end(), rhs.idx.begin(), rhs.idx.end());
    // Insertion sort; every swap of distinct Majoranas contributes a sign.
    int swaps = 0;
    for (std::size_t i = 1; i < seq.size(); ++i)
        for (std::size_t j = i; j > 0 && seq[j - 1] > seq[j]; --j) {
            std::swap(seq[j - 1], seq[j]);
            ++swaps;
        }
    for (std::size_t i = 0; i < seq.size();) {
        if (i + 1 < seq.size() && seq[i] == seq[i + 1]) {
            i += 2;
        } else {
            out.idx.push_back(seq[i]);
            ++i;
        }
    }
    out.phase = (out.phase + 2 * (swaps & 1)) % 4;
    return out;
}

Encoding::Encoding(const Lattice& lattice, std::vector<int> flux, std::vector<int> loops)
    : lattice_(&lattice), flux_(std::move(flux)), loops_(std::move(loops)) {
    const int np = static_cast<int>(lattice.plaquettes().size());
    const int nl = static_cast<int>(lattice.winding_loops().size());
    if (flux_.empty()) flux_.assign(static_cast<std::size_t>(np), 1);
    if (loops_.empty()) loops_.assign(static_cast<std::size_t>(nl), 1);
    if (static_cast<int>(flux_.size()) != np) throw InvalidPattern("flux pattern has the wrong length");
    if (static_cast<int>(loops_.size()) != nl) throw InvalidPattern("loop values have the wrong length");
    for (int v : flux_)
        if (v != 1 && v != -1) throw InvalidPattern("flux values must be +1 or -1");
    for (int v : loops_)
        if (v != 1 && v != -1) throw InvalidPattern("loop values must be +1 or -1");

    const int n = lattice.num_sites();
    extra_of_site_.assign(static_cast<std::size_t>(n), {-1, -1, -1});
    for (int s = 0; s < n; ++s)
        for (LinkType t : {LinkType::XX, LinkType::YY, LinkType::ZZ})
            if (lattice.link_at(s, t) < 0) {
                extra_of_site_[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] =
                    n + static_cast<int>(extra_site_.size());
                extra_site_.push_back(s);
                extra_type_.push_back(t);
            }

    path_ = jw_path(lattice);
    path_pos_.assign(static_cast<std::size_t>(n), -1);
    for (std::size_t k = 0; k < path_.order.size(); ++k) path_pos_[static_cast<std::size_t>(path_.order[k])] = static_cast<int>(k);
    fermions_ = complex_fermion_sites(lattice);

    for (int p = 0; p < np; ++p) {
        gauge_ops_.push_back(plaquette_operator(lattice, p));
        gauge_vals_.push_back(flux_[static_cast<std::size_t>(p)]);
    }
    for (int k = 0; k < nl; ++k) {
        gauge_ops_.push_back(winding_loop_operator(lattice, k));
        gauge_vals_.push_back(loops_[static_cast<std::size_t>(k)]);
    }
    solve_link_signs();
}

int Encoding::site_of(int m) const {
    if (m < 0 || m >= num_majoranas()) throw InvariantBreach("Majorana index out of range");
    return is_extra(m) ? extra_site_[static_cast<std::size_t>(m - num_sites())] : m;
}

LinkType Encoding::extra_type(int m) const {
    if (!is_extra(m)) throw InvariantBreach("not an extra Majorana");
    return extra_type_[static_cast<std::size_t>(m - num_sites())];
}

int Encoding::extra_at(int s, LinkType t) const {
    return extra_of_site_.at(static_cast<std::size_t>(s))[static_cast<std::size_t>(t)];
}

PauliString Encoding::extra_generator(int m) const { return PauliString::single(site_of(m), pauli_of(extra_type(m))); }

Encoding::Walk Encoding::walk_sites(const std::vector<int>& sites, bool use_signs) const {
    Walk w;
    for (std::size_t k = 0; k + 1 < sites.size(); ++k) {
        const int l = lattice_->link_between(sites[k], sites[k + 1]);
        if (l < 0) throw InvariantBreach("walk steps between unlinked sites");
        const Link& link = lattice_->links()[static_cast<std::size_t>(l)];
        w.pauli *= link_operator(*lattice_, l);
        auto m = MajoranaMonomial::bilinear(link.a, link.b);
        if (use_signs && link_sign_[static_cast<std::size_t>(l)] < 0) m.phase = (m.phase + 2) % 4;
        w.mono = w.mono * m;
    }
    return w;
}

void Encoding::solve_link_signs() {
    const Lattice& lat = *lattice_;
    const int nlinks = static_cast<int>(lat.links().size());
    link_sign_.assign(static_cast<std::size_t>(nlinks), 1);

    std::vector<std::vector<int>> cycles;
    std::vector<int> targets;
    for (std::size_t p = 0; p < lat.plaquettes().size(); ++p) {
        const auto& pl = lat.plaquettes()[p];
        std::vector<int> cyc(pl.sites.begin(), pl.sites.end());
        cyc.push_back(pl.sites[0]);
        cycles.push_back(std::move(cyc));
        targets.push_back(static_cast<int>(p));
    }
    const int nloops = static_cast<int>(loops_.size());
    for (int k = 0; k < nloops; ++k) {
        std::vector<int> cyc;
        for (int r = 0; r < lat.site_rows(); ++r) {
            cyc.push_back(lat.index_of(r, 2 * k));
            cyc.push_back(lat.index_of(r, 2 * k + 1));
        }
        cyc.push_back(cyc.front());
        cycles.push_back(std::move(cyc));
        targets.push_back(static_cast<int>(lat.plaquettes().size()) + k);
    }

    // Unknown order: XX and YY first so that ZZ links become free variables
    // (and stay +1) whenever the system leaves room.
    std::vector<int> order;
    for (int pass = 0; pass < 2; ++pass)
        for (int l = 0; l < nlinks; ++l)
            if ((lat.links()[static_cast<std::size_t>(l)].type == LinkType::ZZ) == (pass == 1)) order.push_back(l);
    std::vector<int> column_of(static_cast<std::size_t>(nlinks));
    for (int c = 0; c < nlinks; ++c) column_of[static_cast<std::size_t>(order[static_cast<std::size_t>(c)])] = c;

    // Augmented rows: link columns then the right-hand side bit.
    const int width = nlinks + 1;
    std::vector<std::vector<std::uint64_t>> rows;
    for (std::size_t c = 0; c < cycles.size(); ++c) {
        const Walk w = walk_sites(cycles[c], false);
        if (!w.mono.is_scalar()) throw InvariantBreach("closed walk left a Majorana residue");
        const PauliString& g = gauge_ops_[static_cast<std::size_t>(targets[c])];
        if (!w.pauli.same_support_letters(g)) throw InvariantBreach("closed walk does not reproduce its gauge operator");
        const int diff = ((w.pauli.phase() - w.mono.phase) % 4 + 4) % 4;
        if (diff % 2) throw InvariantBreach("closed walk has an imaginary sign");
        // prod s = i^diff * value
        const bool rhs = (diff == 2) != (gauge_vals_[static_cast<std::size_t>(targets[c])] < 0);
        std::vector<std::uint64_t> row(static_cast<std::size_t>((width + 63) / 64), 0);
        for (std::size_t k = 0; k + 1 < cycles[c].size(); ++k)
            flip_bit(row, column_of[static_cast<std::size_t>(lat.link_between(cycles[c][k], cycles[c][k + 1]))]);
        if (rhs) flip_bit(row, nlinks);
        rows.push_back(std::move(row));
    }

    std::vector<Gf2Row> basis;
    std::vector<int> pivots;
    build_echelon(rows, width, basis, pivots);
    for (std::size_t r = 0; r < basis.size(); ++r) {
        if (pivots[r] == nlinks) throw InvalidPattern("plaquette pattern is inconsistent with the winding loop values");
        if (get_bit(basis[r].bits, nlinks))
            link_sign_[static_cast<std::size_t>(order[static_cast<std::size_t>(pivots[r])])] = -1;
    }
}

PauliString Encoding::finish_bilinear(int x, int y, const std::vector<int>& site_path) const {
    PauliString p;
    MajoranaMonomial mono;
    if (is_extra(x)) {
        p *= extra_generator(x);
        mono = mono * MajoranaMonomial::bilinear(site_of(x), x);
    }
    const Walk w = walk_sites(site_path, true);
    p *= w.pauli;
    mono = mono * w.mono;
    if (is_extra(y)) {
        p *= extra_generator(y);
        mono = mono * MajoranaMonomial::bilinear(site_of(y), y);
    }
    if (mono.idx != std::vector<int>{std::min(x, y), std::max(x, y)})
        throw InvariantBreach("bilinear walk ended on the wrong Majoranas");
    PauliString out = p.times_i(1 - mono.phase);
    if (x > y) out = -out;
    if (!out.is_hermitian()) throw InvariantBreach("bilinear Pauli form is not Hermitian");
    return out;
}

PauliString Encoding::bilinear(int x, int y) const {
    if (x == y) throw InvariantBreach("bilinear needs two distinct Majoranas");
    const int sx = site_of(x), sy = site_of(y);
    const int px = path_pos_[static_cast<std::size_t>(sx)], py = path_pos_[static_cast<std::size_t>(sy)];
    std::vector<int> seg;
    if (px <= py) {
        seg.assign(path_.order.begin() + px, path_.order.begin() + py + 1);
    } else {
        for (int k = px; k >= py; --k) seg.push_back(path_.order[static_cast<std::size_t>(k)]);
    }
    return finish_bilinear(x, y, seg);
}

std::vector<int> Encoding::shortest_site_path(int from, int to) const {
    const int n = num_sites();
    std::vector<int> prev(static_cast<std::size_t>(n), -2);
    std::deque<int> queue{from};
    prev[static_cast<std::size_t>(from)] = -1;
    while (!queue.empty()) {
        const int s = queue.front();
        queue.pop_front();
        if (s == to) break;
        for (LinkType t : {LinkType::XX, LinkType::YY, LinkType::ZZ}) {
            const int l = lattice_->link_at(s, t);
            if (l < 0) continue;
            const Link& link = lattice_->links()[static_cast<std::size_t>(l)];
            const int o = link.a == s ? link.b : link.a;
            if (prev[static_cast<std::size_t>(o)] != -2) continue;
            prev[static_cast<std::size_t>(o)] = s;
            queue.push_back(o);
        }
    }
    if (prev[static_cast<std::size_t>(to)] == -2) throw NoPath("sites are not connected");
    std::vector<int> path;
    for (int s = to; s != -1; s = prev[static_cast<std::size_t>(s)]) path.push_back(s);
    std::reverse(path.begin(), path.end());
    return path;
}

PauliString Encoding::bilinear_short(int x, int y) const {
    if (x == y) throw InvariantBreach("bilinear needs two distinct Majoranas");
    return finish_bilinear(x, y, shortest_site_path(site_of(x), site_of(y)));
}

PauliString Encoding::pair_creation_string(int pair_a, int pair_b, int* maj_x, int* maj_y) const {
    const auto& pairs = fermions_.pairs;
    if (pair_a < 0 || pair_b < 0 || pair_a >= static_cast<int>(pairs.size()) || pair_b >= static_cast<int>(pairs.size()) ||
        pair_a == pair_b)
        throw InvalidGeometry("pair creation needs two distinct dimers");
    const auto& da = pairs[static_cast<std::size_t>(pair_a)];
    const auto& db = pairs[static_cast<std::size_t>(pair_b)];
    PauliString best;
    int best_w = -1, bx = -1, by = -1;
    for (int x : {da.first, da.second})
        for (int y : {db.first, db.second}) {
            PauliString cand = bilinear_short(x, y);
            if (best_w < 0 || cand.weight() < best_w) {
                best = cand;
                best_w = cand.weight();
                bx = x;
                by = y;
            }
        }
    if (maj_x) *maj_x = bx;
    if (maj_y) *maj_y = by;
    return best;
}

std::optional<int> Encoding::gauge_value(const PauliString& g) const {
    const int n = num_sites();
    std::vector<std::vector<std::uint64_t>> rows;
    rows.reserve(gauge_ops_.size());
    for (const auto& op : gauge_ops_) rows.push_back(symplectic_bits(op, n));
    std::vector<Gf2Row> basis;
    std::vector<int> pivots;
    build_echelon(rows, 2 * n, basis, pivots);
    const std::size_t cw = (rows.size() + 63) / 64 + 1;
    auto combo = express(basis, pivots, symplectic_bits(g, n), cw);
    if (!combo) return std::nullopt;
    PauliString prod;
    int value = 1;
    for (std::size_t i = 0; i < gauge_ops_.size(); ++i)
        if (get_bit(*combo, static_cast<int>(i))) {
            prod *= gauge_ops_[i];
            value *= gauge_vals_[i];
        }
    if (!prod.same_support_letters(g)) throw InvariantBreach("gauge reconstruction mismatch");
    const int delta = ((g.phase() - prod.phase()) % 4 + 4) % 4;
    if (delta % 2) return std::nullopt;
    return delta == 2 ? -value : value;
}

std::optional<Encoding::Decomposition> Encoding::decompose(const PauliString& p) const {
    if (!p.is_hermitian()) return std::nullopt;
    const int m = num_majoranas();
    std::vector<char> in_set(static_cast<std::size_t>(m), 0);
    for (std::size_t t = 0; t < path_.links.size(); ++t) {
        const int a = path_.order[t], b = path_.order[t + 1];
        const bool anti = !p.commutes(link_operator(*lattice_, path_.links[t]));
        in_set[static_cast<std::size_t>(b)] = static_cast<char>(in_set[static_cast<std::size_t>(a)] ^ (anti ? 1 : 0));
    }
    for (int e = num_sites(); e < m; ++e) {
        const bool anti = !p.commutes(extra_generator(e));
        in_set[static_cast<std::size_t>(e)] =
            static_cast<char>(in_set[static_cast<std::size_t>(site_of(e))] ^ (anti ? 1 : 0));
    }
    std::vector<int> set0, set1;
    for (int k = 0; k < m; ++k) (in_set[static_cast<std::size_t>(k)] ? set0 : set1).push_back(k);
    if (set0.size() % 2) return std::nullopt;
    std::vector<std::vector<int>> candidates{set0, set1};
    if (set1.size() < set0.size()) std::swap(candidates[0], candidates[1]);

    for (const auto& cand : candidates) {
        PauliString f;
        for (std::size_t k = 0; k < cand.size(); k += 2) f *= bilinear(cand[k], cand[k + 1]);
        const PauliString g = p * f;
        const auto value = gauge_value(g);
        if (value) return Decomposition{cand, *value};
    }
    return std::nullopt;
}

std::vector<Encoding::Stabilizer> Encoding::vacuum_stabilizers() const {
    const Lattice& lat = *lattice_;
    std::vector<Stabilizer> out;
    for (std::size_t l = 0; l < lat.links().size(); ++l)
        if (lat.links()[l].type == LinkType::ZZ) out.push_back({link_operator(lat, static_cast<int>(l)), 1, true});
    for (std::size_t k = 0; k < gauge_ops_.size(); ++k) out.push_back({gauge_ops_[k], gauge_vals_[k], true});
    for (int e = num_sites(); e < num_majoranas(); ++e)
        if (extra_type(e) == LinkType::ZZ) out.push_back({extra_generator(e), 1, false});
    for (const auto& [a, b] : fermions_.pairs) {
        for (LinkType ta : {LinkType::XX, LinkType::YY}) {
            const int ea = extra_at(a, ta);
            if (ea < 0) continue;
            for (LinkType tb : {LinkType::XX, LinkType::YY}) {
                const int eb = extra_at(b, tb);
                if (eb >= 0) out.push_back({bilinear(ea, eb), 1, false});
            }
        }
    }
    return out;
}

}  // namespace kfs
