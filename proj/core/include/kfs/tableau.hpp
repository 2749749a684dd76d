#pragma once

#include <cstdint>
#include <vector>

#include "kfs/pauli.hpp"
#include "kfs/rng.hpp"

namespace kfs {

// Aaronson-Gottesman stabilizer tableau with bit-packed rows. Rows [0, n) are
// destabilizers, [n, 2n) stabilizers, row 2n is scratch.
class CliffordState {
public:
    explicit CliffordState(int num_qubits);

    int num_qubits() const { return n_; }

    void h(int q);
    void s(int q);
    void sdg(int q);
    void x(int q);
    void y(int q);
    void z(int q);
    void cx(int c, int t);
    void cz(int a, int b);
    void cy(int c, int t);
    void apply_pauli(const PauliString& p);
    // Returns qubit q to |0>, whatever it was entangled with.
    void reset(int q, Rng& rng);

    // Measures a Hermitian Pauli string. Deterministic when P (or -P) lies in
    // the stabilizer group; otherwise a uniformly random outcome with collapse.
    int measure(const PauliString& p, Rng& rng);
    // Same, but a random outcome is replaced by `forced` instead of a coin flip.
    int measure_forced(const PauliString& p, int forced);
    // +1/-1 when deterministic, 0 when the outcome would be random. No collapse.
    int peek(const PauliString& p) const;

    // Stabilizer generator k as a signed Pauli string (for debugging/tests).
    PauliString stabilizer(int k) const;

private:
    int n_;
    int words_;
    std::vector<std::uint64_t> x_, z_;
    std::vector<std::uint8_t> r_;

    std::uint64_t* xr(int row) { return x_.data() + static_cast<std::size_t>(row) * static_cast<std::size_t>(words_); }
    std::uint64_t* zr(int row) { return z_.data() + static_cast<std::size_t>(row) * static_cast<std::size_t>(words_); }
    const std::uint64_t* xr(int row) const { return x_.data() + static_cast<std::size_t>(row) * static_cast<std::size_t>(words_); }
    const std::uint64_t* zr(int row) const { return z_.data() + static_cast<std::size_t>(row) * static_cast<std::size_t>(words_); }

    bool getx(int row, int q) const { return (xr(row)[q >> 6] >> (q & 63)) & 1U; }
    bool getz(int row, int q) const { return (zr(row)[q >> 6] >> (q & 63)) & 1U; }

    void load(int row, const PauliString& p, int sign_bit);
    bool anticommutes_with(int row, const std::vector<std::uint64_t>& px, const std::vector<std::uint64_t>& pz) const;
    void rowsum(int h, int i);
    int measure_impl(const PauliString& p, int random_outcome_bit, bool* was_random);
};

}  // namespace kfs
