#include "kfs/pauli.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "kfs/errors.hpp"
#include "kfs/lattice.hpp"

namespace kfs {

char pauli_char(Pauli p) {
    switch (p) {
        case Pauli::I: return 'I';
        case Pauli::X: return 'X';
        case Pauli::Y: return 'Y';
        case Pauli::Z: return 'Z';
    }
    return '?';
}

Pauli pauli_from_char(char c) {
    switch (c) {
        case 'I': return Pauli::I;
        case 'X': return Pauli::X;
        case 'Y': return Pauli::Y;
        case 'Z': return Pauli::Z;
        default: throw SchemaError(std::string("not a Pauli letter: ") + c);
    }
}

namespace {

// Phase exponent k of i^k in a*b for single-qubit letters.
int product_phase(Pauli a, Pauli b) {
    static constexpr int table[4][4] = {
        // I  X  Z  Y   (rhs)
        {0, 0, 0, 0},  // I
        {0, 0, 3, 1},  // X: XZ = -iY, XY = iZ
        {0, 1, 0, 3},  // Z: ZX = iY, ZY = -iX
        {0, 3, 1, 0},  // Y: YX = -iZ, YZ = iX
    };
    return table[static_cast<int>(a)][static_cast<int>(b)];
}

}  // namespace

PauliString PauliString::single(int site, Pauli p, int phase) {
    PauliString s;
    if (p != Pauli::I) s.terms_.emplace_back(site, p);
    s.set_phase(phase);
    return s;
}

PauliString PauliString::from_terms(std::vector<Term> terms, int phase) {
    std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
    PauliString out;
    out.set_phase(phase);
    // Merge repeated sites left to right so the written order defines the phase.
    for (const auto& t : terms) {
        if (!out.terms_.empty() && out.terms_.back().first == t.first) {
            Pauli prev = out.terms_.back().second;
            out.phase_ = (out.phase_ + product_phase(prev, t.second)) % 4;
            const auto merged = static_cast<Pauli>(static_cast<int>(prev) ^ static_cast<int>(t.second));
            if (merged == Pauli::I) out.terms_.pop_back();
            else out.terms_.back().second = merged;
        } else if (t.second != Pauli::I) {
            out.terms_.push_back(t);
        }
    }
    return out;
}

PauliString PauliString::uniform(const std::vector<int>& sites, Pauli p) {
    std::vector<Term> terms;
    terms.reserve(sites.size());
    for (int s : sites) terms.emplace_back(s, p);
    return from_terms(std::move(terms));
}

Pauli PauliString::at(int site) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), site,
                               [](const Term& t, int s) { return t.first < s; });
    return (it != terms_.end() && it->first == site) ? it->second : Pauli::I;
}

PauliString PauliString::operator*(const PauliString& rhs) const {
    PauliString out;
    out.terms_.reserve(terms_.size() + rhs.terms_.size());
    int phase = phase_ + rhs.phase_;
    auto a = terms_.begin(), b = rhs.terms_.begin();
    while (a != terms_.end() || b != rhs.terms_.end()) {
        if (b == rhs.terms_.end() || (a != terms_.end() && a->first < b->first)) {
            out.terms_.push_back(*a++);
        } else if (a == terms_.end() || b->first < a->first) {
            out.terms_.push_back(*b++);
        } else {
            phase += product_phase(a->second, b->second);
            const auto p = static_cast<Pauli>(static_cast<int>(a->second) ^ static_cast<int>(b->second));
            if (p != Pauli::I) out.terms_.emplace_back(a->first, p);
            ++a;
            ++b;
        }
    }
    out.phase_ = phase % 4;
    return out;
}

PauliString PauliString::operator-() const { return times_i(2); }

PauliString PauliString::times_i(int k) const {
    PauliString out = *this;
    out.set_phase(phase_ + k);
    return out;
}

bool PauliString::commutes(const PauliString& rhs) const {
    int anti = 0;
    auto a = terms_.begin(), b = rhs.terms_.begin();
    while (a != terms_.end() && b != rhs.terms_.end()) {
        if (a->first < b->first) ++a;
        else if (b->first < a->first) ++b;
        else {
            anti += a->second != b->second;
            ++a;
            ++b;
        }
    }
    return anti % 2 == 0;
}

namespace {

const char* phase_prefix(int phase) {
    static const char* names[4] = {"+", "+i", "-", "-i"};
    return names[phase];
}

}  // namespace

std::string PauliString::to_string(const Lattice& lattice) const {
    std::ostringstream os;
    os << phase_prefix(phase_);
    for (const auto& [s, p] : terms_) {
        const Site& site = lattice.site(s);
        os << ' ' << pauli_char(p) << "@(" << site.row << ',' << site.col << ')';
    }
    return os.str();
}

std::string PauliString::to_string() const {
    std::ostringstream os;
    os << phase_prefix(phase_);
    for (const auto& [s, p] : terms_) os << ' ' << pauli_char(p) << s;
    return os.str();
}

PauliString PauliString::parse(const std::string& text, const Lattice& lattice) {
    std::istringstream is(text);
    std::string tok;
    if (!(is >> tok)) throw SchemaError("empty Pauli string");
    // The sign may stand alone ("- X@(0,1)"), carry the i ("-i X@(0,1)"),
    // be fused with the first term ("-X@(0,1)") or be omitted.
    int phase = 0;
    std::string pending;
    if (tok[0] == '+' || tok[0] == '-') {
        phase = tok[0] == '-' ? 2 : 0;
        std::string rest = tok.substr(1);
        if (!rest.empty() && rest[0] == 'i' && (rest.size() == 1 || rest[1] != '@')) {
            phase += 1;
            rest = rest.substr(1);
        }
        pending = rest;
    } else {
        pending = tok;
    }
    std::vector<Term> terms;
    auto next = [&](std::string& out) {
        if (!pending.empty()) {
            out = std::move(pending);
            pending.clear();
            return true;
        }
        return static_cast<bool>(is >> out);
    };
    while (next(tok)) {
        int r = 0, c = 0;
        char letter = 0;
        char tail = 0;
        if (std::sscanf(tok.c_str(), "%c@(%d,%d%c", &letter, &r, &c, &tail) != 4 || tail != ')')
            throw SchemaError("bad Pauli term '" + tok + "'");
        const int idx = lattice.index_of(r, c);
        if (idx < 0) throw SchemaError("site (" + std::to_string(r) + "," + std::to_string(c) + ") not in lattice");
        terms.emplace_back(idx, pauli_from_char(letter));
    }
    return from_terms(std::move(terms), phase);
}

PauliString link_operator(const Lattice& lattice, int link) {
    const Link& l = lattice.links()[static_cast<std::size_t>(link)];
    const Pauli p = pauli_from_char(link_letter(l.type));
    return PauliString::from_terms({{l.a, p}, {l.b, p}});
}

PauliString plaquette_operator(const Lattice& lattice, int plaquette) {
    const Plaquette& p = lattice.plaquettes()[static_cast<std::size_t>(plaquette)];
    std::vector<PauliString::Term> terms;
    for (std::size_t k = 0; k < 6; ++k) terms.emplace_back(p.sites[k], pauli_from_char(p.letters[k]));
    return PauliString::from_terms(std::move(terms));
}

PauliString winding_loop_operator(const Lattice& lattice, int k) {
    const auto loops = lattice.winding_loops();
    return PauliString::uniform(loops.at(static_cast<std::size_t>(k)), Pauli::Z);
}

PauliString loop_around(const Lattice& lattice, const std::vector<int>& plaquettes) {
    PauliString out;
    for (int p : plaquettes) out *= plaquette_operator(lattice, p);
    return out;
}

}  // namespace kfs
