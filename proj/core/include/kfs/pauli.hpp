#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace kfs {

class Lattice;

// Single-qubit Pauli with symplectic bits: bit 0 = x, bit 1 = z.
enum class Pauli : std::uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

char pauli_char(Pauli p);
Pauli pauli_from_char(char c);

// Sparse signed Pauli string i^phase * prod_k P_{site_k}. Terms are kept
// sorted by site index with identities removed.
class PauliString {
public:
    using Term = std::pair<int, Pauli>;

    PauliString() = default;
    static PauliString single(int site, Pauli p, int phase = 0);
    static PauliString from_terms(std::vector<Term> terms, int phase = 0);
    // Same letter on every listed site.
    static PauliString uniform(const std::vector<int>& sites, Pauli p);

    int phase() const { return phase_; }
    void set_phase(int k) { phase_ = ((k % 4) + 4) % 4; }
    const std::vector<Term>& terms() const { return terms_; }
    int weight() const { return static_cast<int>(terms_.size()); }
    bool is_identity() const { return terms_.empty(); }
    bool is_hermitian() const { return phase_ % 2 == 0; }
    Pauli at(int site) const;
    int max_site() const { return terms_.empty() ? -1 : terms_.back().first; }

    PauliString operator*(const PauliString& rhs) const;
    PauliString& operator*=(const PauliString& rhs) { return *this = *this * rhs; }
    PauliString operator-() const;
    PauliString times_i(int k = 1) const;

    bool commutes(const PauliString& rhs) const;
    bool same_support_letters(const PauliString& rhs) const { return terms_ == rhs.terms_; }
    friend bool operator==(const PauliString& a, const PauliString& b) {
        return a.phase_ == b.phase_ && a.terms_ == b.terms_;
    }

    // "+i X@(0,1) Z@(1,2)"; the identity prints as "+".
    std::string to_string(const Lattice& lattice) const;
    // Index form "+i X1 Z7" for lattice-free contexts.
    std::string to_string() const;
    static PauliString parse(const std::string& text, const Lattice& lattice);

private:
    std::vector<Term> terms_;
    int phase_ = 0;
};

inline PauliString multiply(const PauliString& p, const PauliString& q) { return p * q; }
inline bool commutes(const PauliString& p, const PauliString& q) { return p.commutes(q); }

// sigma^t sigma^t on the two endpoints of a link.
PauliString link_operator(const Lattice& lattice, int link);
// X Z Y X Z Y around hexagon p.
PauliString plaquette_operator(const Lattice& lattice, int plaquette);
// Z on both columns of winding loop k.
PauliString winding_loop_operator(const Lattice& lattice, int k);
// Product of plaquette operators, i.e. the closed loop enclosing them.
PauliString loop_around(const Lattice& lattice, const std::vector<int>& plaquettes);

}  // namespace kfs
