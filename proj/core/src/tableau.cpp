#include "kfs/tableau.hpp"

#include <algorithm>
#include <bit>

#include "kfs/errors.hpp"

namespace kfs {

namespace {

// Phase exponent (mod 4) picked up when the Pauli row (x1, z1) multiplies
// the row (x2, z2), summed over all qubits with popcounts.
int rowsum_phase(const std::uint64_t* x1, const std::uint64_t* z1, const std::uint64_t* x2,
                 const std::uint64_t* z2, int words) {
    int sum = 0;
    for (int w = 0; w < words; ++w) {
        const std::uint64_t X1 = x1[w] & ~z1[w], Y1 = x1[w] & z1[w], Z1 = ~x1[w] & z1[w];
        const std::uint64_t X2 = x2[w] & ~z2[w], Y2 = x2[w] & z2[w], Z2 = ~x2[w] & z2[w];
        const std::uint64_t plus = (Y1 & Z2) | (X1 & Y2) | (Z1 & X2);
        const std::uint64_t minus = (Y1 & X2) | (X1 & Z2) | (Z1 & Y2);
        sum += std::popcount(plus) - std::popcount(minus);
    }
    return ((sum % 4) + 4) % 4;
}

}  // namespace

CliffordState::CliffordState(int num_qubits) : n_(num_qubits), words_((num_qubits + 63) / 64) {
    const auto rows = static_cast<std::size_t>(2 * n_ + 1);
    x_.assign(rows * static_cast<std::size_t>(words_), 0);
    z_.assign(rows * static_cast<std::size_t>(words_), 0);
    r_.assign(rows, 0);
    for (int q = 0; q < n_; ++q) {
        xr(q)[q >> 6] |= std::uint64_t{1} << (q & 63);
        zr(q + n_)[q >> 6] |= std::uint64_t{1} << (q & 63);
    }
}

void CliffordState::h(int q) {
    const int w = q >> 6;
    const std::uint64_t m = std::uint64_t{1} << (q & 63);
    for (int i = 0; i < 2 * n_; ++i) {
        std::uint64_t& xw = xr(i)[w];
        std::uint64_t& zw = zr(i)[w];
        const bool xb = xw & m, zb = zw & m;
        r_[static_cast<std::size_t>(i)] ^= static_cast<std::uint8_t>(xb && zb);
        if (xb != zb) {
            xw ^= m;
            zw ^= m;
        }
    }
}

void CliffordState::s(int q) {
    const int w = q >> 6;
    const std::uint64_t m = std::uint64_t{1} << (q & 63);
    for (int i = 0; i < 2 * n_; ++i) {
        const bool xb = xr(i)[w] & m, zb = zr(i)[w] & m;
        r_[static_cast<std::size_t>(i)] ^= static_cast<std::uint8_t>(xb && zb);
        if (xb) zr(i)[w] ^= m;
    }
}

void CliffordState::sdg(int q) {
    s(q);
    z(q);
}

void CliffordState::x(int q) {
    for (int i = 0; i < 2 * n_; ++i) r_[static_cast<std::size_t>(i)] ^= static_cast<std::uint8_t>(getz(i, q));
}

void CliffordState::z(int q) {
    for (int i = 0; i < 2 * n_; ++i) r_[static_cast<std::size_t>(i)] ^= static_cast<std::uint8_t>(getx(i, q));
}

void CliffordState::y(int q) {
    for (int i = 0; i < 2 * n_; ++i)
        r_[static_cast<std::size_t>(i)] ^= static_cast<std::uint8_t>(getx(i, q) != getz(i, q));
}

void CliffordState::cx(int c, int t) {
    const int wc = c >> 6, wt = t >> 6;
    const std::uint64_t mc = std::uint64_t{1} << (c & 63), mt = std::uint64_t{1} << (t & 63);
    for (int i = 0; i < 2 * n_; ++i) {
        std::uint64_t* xi = xr(i);
        std::uint64_t* zi = zr(i);
        const bool xc = xi[wc] & mc, zc = zi[wc] & mc, xt = xi[wt] & mt, zt = zi[wt] & mt;
        r_[static_cast<std::size_t>(i)] ^= static_cast<std::uint8_t>(xc && zt && (xt == zc));
        if (xc) xi[wt] ^= mt;
        if (zt) zi[wc] ^= mc;
    }
}

void CliffordState::cz(int a, int b) {
    h(b);
    cx(a, b);
    h(b);
}

void CliffordState::cy(int c, int t) {
    sdg(t);
    cx(c, t);
    s(t);
}

void CliffordState::apply_pauli(const PauliString& p) {
    for (const auto& [q, letter] : p.terms()) {
        switch (letter) {
            case Pauli::X: x(q); break;
            case Pauli::Y: y(q); break;
            case Pauli::Z: z(q); break;
            case Pauli::I: break;
        }
    }
}

void CliffordState::reset(int q, Rng& rng) {
    if (measure(PauliString::single(q, Pauli::Z), rng) < 0) x(q);
}

void CliffordState::load(int row, const PauliString& p, int sign_bit) {
    std::fill(xr(row), xr(row) + words_, 0);
    std::fill(zr(row), zr(row) + words_, 0);
    for (const auto& [q, letter] : p.terms()) {
        const auto bits = static_cast<unsigned>(letter);
        if (bits & 1U) xr(row)[q >> 6] |= std::uint64_t{1} << (q & 63);
        if (bits & 2U) zr(row)[q >> 6] |= std::uint64_t{1} << (q & 63);
    }
    r_[static_cast<std::size_t>(row)] = static_cast<std::uint8_t>(sign_bit);
}

bool CliffordState::anticommutes_with(int row, const std::vector<std::uint64_t>& px,
                                      const std::vector<std::uint64_t>& pz) const {
    int parity = 0;
    for (int w = 0; w < words_; ++w)
        parity ^= std::popcount((xr(row)[w] & pz[static_cast<std::size_t>(w)]) ^
                                (zr(row)[w] & px[static_cast<std::size_t>(w)])) & 1;
    return parity != 0;
}

void CliffordState::rowsum(int h, int i) {
    const int phase = 2 * r_[static_cast<std::size_t>(h)] + 2 * r_[static_cast<std::size_t>(i)] +
                      rowsum_phase(xr(i), zr(i), xr(h), zr(h), words_);
    r_[static_cast<std::size_t>(h)] = static_cast<std::uint8_t>((phase % 4) == 2);
    for (int w = 0; w < words_; ++w) {
        xr(h)[w] ^= xr(i)[w];
        zr(h)[w] ^= zr(i)[w];
    }
}

namespace {

void to_bits(const PauliString& p, int words, std::vector<std::uint64_t>& px, std::vector<std::uint64_t>& pz) {
    px.assign(static_cast<std::size_t>(words), 0);
    pz.assign(static_cast<std::size_t>(words), 0);
    for (const auto& [q, letter] : p.terms()) {
        const auto bits = static_cast<unsigned>(letter);
        if (bits & 1U) px[static_cast<std::size_t>(q >> 6)] |= std::uint64_t{1} << (q & 63);
        if (bits & 2U) pz[static_cast<std::size_t>(q >> 6)] |= std::uint64_t{1} << (q & 63);
    }
}

int sign_of(const PauliString& p) {
    if (!p.is_hermitian()) throw InvariantBreach("cannot measure non-Hermitian Pauli " + p.to_string());
    return p.phase() == 0 ? 1 : -1;
}

}  // namespace

int CliffordState::measure_impl(const PauliString& p, int random_outcome_bit, bool* was_random) {
    if (p.max_site() >= n_) throw InvariantBreach("Pauli acts outside the tableau");
    const int sign = sign_of(p);
    std::vector<std::uint64_t> px, pz;
    to_bits(p, words_, px, pz);

    int pivot = -1;
    for (int i = n_; i < 2 * n_; ++i)
        if (anticommutes_with(i, px, pz)) {
            pivot = i;
            break;
        }

    if (pivot >= 0) {
        if (was_random) *was_random = true;
        for (int i = 0; i < 2 * n_; ++i)
            if (i != pivot && anticommutes_with(i, px, pz)) rowsum(i, pivot);
        std::copy(xr(pivot), xr(pivot) + words_, xr(pivot - n_));
        std::copy(zr(pivot), zr(pivot) + words_, zr(pivot - n_));
        r_[static_cast<std::size_t>(pivot - n_)] = r_[static_cast<std::size_t>(pivot)];
        // random_outcome_bit picks the eigenvalue of P itself; the stored row
        // is the unsigned string, whose eigenvalue differs by P's sign.
        const int outcome = random_outcome_bit ? -1 : 1;
        PauliString unsigned_p = p;
        unsigned_p.set_phase(0);
        load(pivot, unsigned_p, outcome * sign < 0 ? 1 : 0);
        return outcome;
    }

    if (was_random) *was_random = false;
    const int scratch = 2 * n_;
    std::fill(xr(scratch), xr(scratch) + words_, 0);
    std::fill(zr(scratch), zr(scratch) + words_, 0);
    r_[static_cast<std::size_t>(scratch)] = 0;
    for (int i = 0; i < n_; ++i)
        if (anticommutes_with(i, px, pz)) rowsum(scratch, i + n_);
    return sign * (r_[static_cast<std::size_t>(scratch)] ? -1 : 1);
}

int CliffordState::measure(const PauliString& p, Rng& rng) { return measure_impl(p, rng.bit() ? 1 : 0, nullptr); }

int CliffordState::measure_forced(const PauliString& p, int forced) {
    return measure_impl(p, forced < 0 ? 1 : 0, nullptr);
}

int CliffordState::peek(const PauliString& p) const {
    if (p.max_site() >= n_) throw InvariantBreach("Pauli acts outside the tableau");
    const int sign = sign_of(p);
    std::vector<std::uint64_t> px, pz;
    to_bits(p, words_, px, pz);
    for (int i = n_; i < 2 * n_; ++i)
        if (anticommutes_with(i, px, pz)) return 0;
    std::vector<std::uint64_t> sx(static_cast<std::size_t>(words_), 0), sz(static_cast<std::size_t>(words_), 0);
    int r = 0;
    for (int i = 0; i < n_; ++i) {
        if (!anticommutes_with(i, px, pz)) continue;
        const int row = i + n_;
        const int phase = 2 * r + 2 * r_[static_cast<std::size_t>(row)] +
                          rowsum_phase(xr(row), zr(row), sx.data(), sz.data(), words_);
        r = (phase % 4) == 2;
        for (int w = 0; w < words_; ++w) {
            sx[static_cast<std::size_t>(w)] ^= xr(row)[w];
            sz[static_cast<std::size_t>(w)] ^= zr(row)[w];
        }
    }
    return sign * (r ? -1 : 1);
}

PauliString CliffordState::stabilizer(int k) const {
    const int row = n_ + k;
    std::vector<PauliString::Term> terms;
    for (int q = 0; q < n_; ++q) {
        const int bits = (getx(row, q) ? 1 : 0) | (getz(row, q) ? 2 : 0);
        if (bits) terms.emplace_back(q, static_cast<Pauli>(bits));
    }
    return PauliString::from_terms(std::move(terms), r_[static_cast<std::size_t>(row)] ? 2 : 0);
}

}  // namespace kfs
