#include "kfs/oracle.hpp"

#include <bit>
#include <cmath>

#include "kfs/encoding.hpp"
#include "kfs/errors.hpp"

namespace kfs {

namespace {

struct Masks {
    std::uint64_t x = 0, z = 0;
    int phase = 0;  // P = i^phase X^x Z^z
};

Masks masks_of(const PauliString& p, int n) {
    Masks m;
    m.phase = p.phase();
    for (const auto& [q, letter] : p.terms()) {
        if (q >= n) throw InvariantBreach("Pauli acts outside the statevector");
        const auto b = static_cast<unsigned>(letter);
        if (b & 1U) m.x |= std::uint64_t{1} << q;
        if (b & 2U) m.z |= std::uint64_t{1} << q;
        if (letter == Pauli::Y) m.phase += 1;  // Y = i X Z
    }
    m.phase %= 4;
    return m;
}

const std::complex<double> kIpow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

}  // namespace

DenseState::DenseState(int num_qubits) : n_(num_qubits) {
    if (num_qubits < 0 || num_qubits > max_qubits)
        throw TooLarge("statevector oracle is capped at " + std::to_string(max_qubits) + " qubits");
    amp_.assign(std::size_t{1} << n_, Amp{0.0, 0.0});
    amp_[0] = 1.0;
}

double DenseState::norm() const {
    double s = 0.0;
    for (const Amp& a : amp_) s += std::norm(a);
    return std::sqrt(s);
}

void DenseState::apply_1q(int q, const Eigen::Matrix2cd& u) {
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t i = 0; i < amp_.size(); ++i) {
        if (i & bit) continue;
        const Amp a0 = amp_[i], a1 = amp_[i | bit];
        amp_[i] = u(0, 0) * a0 + u(0, 1) * a1;
        amp_[i | bit] = u(1, 0) * a0 + u(1, 1) * a1;
    }
}

void DenseState::h(int q) {
    Eigen::Matrix2cd u;
    const double r = 1.0 / std::sqrt(2.0);
    u << r, r, r, -r;
    apply_1q(q, u);
}

void DenseState::s(int q) {
    Eigen::Matrix2cd u;
    u << 1, 0, 0, Amp(0, 1);
    apply_1q(q, u);
}

void DenseState::cx(int c, int t) {
    const std::size_t bc = std::size_t{1} << c, bt = std::size_t{1} << t;
    for (std::size_t i = 0; i < amp_.size(); ++i)
        if ((i & bc) && !(i & bt)) std::swap(amp_[i], amp_[i | bt]);
}

void DenseState::cy(int c, int t) {
    const std::size_t bc = std::size_t{1} << c, bt = std::size_t{1} << t;
    for (std::size_t i = 0; i < amp_.size(); ++i)
        if ((i & bc) && !(i & bt)) {
            const Amp a0 = amp_[i], a1 = amp_[i | bt];
            amp_[i] = Amp(0, -1) * a1;
            amp_[i | bt] = Amp(0, 1) * a0;
        }
}

void DenseState::cp(int a, int b, double theta) {
    const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
    const Amp ph = std::polar(1.0, M_PI * theta);
    for (std::size_t i = 0; i < amp_.size(); ++i)
        if ((i & mask) == mask) amp_[i] *= ph;
}

std::vector<DenseState::Amp> DenseState::applied(const PauliString& p) const {
    const Masks m = masks_of(p, n_);
    std::vector<Amp> out(amp_.size());
    for (std::size_t i = 0; i < amp_.size(); ++i) {
        const int sign = (std::popcount(static_cast<std::uint64_t>(i) & m.z) & 1) ? 2 : 0;
        out[i ^ m.x] = kIpow[(m.phase + sign) % 4] * amp_[i];
    }
    return out;
}

void DenseState::apply_pauli(const PauliString& p) { amp_ = applied(p); }

void DenseState::pauli_rotation(const PauliString& p, double angle) {
    if (!p.is_hermitian()) throw InvariantBreach("rotation generator must be Hermitian");
    const auto pa = applied(p);
    const double c = std::cos(angle), s = std::sin(angle);
    for (std::size_t i = 0; i < amp_.size(); ++i) amp_[i] = c * amp_[i] + Amp(0, s) * pa[i];
}

double DenseState::expectation(const PauliString& p) const {
    const auto pa = applied(p);
    Amp acc{0.0, 0.0};
    for (std::size_t i = 0; i < amp_.size(); ++i) acc += std::conj(amp_[i]) * pa[i];
    return acc.real();
}

double DenseState::project(const PauliString& p, int outcome) {
    if (!p.is_hermitian()) throw InvariantBreach("measured Pauli must be Hermitian");
    const auto pa = applied(p);
    const double sgn = outcome < 0 ? -1.0 : 1.0;
    double prob = 0.0;
    for (std::size_t i = 0; i < amp_.size(); ++i) {
        amp_[i] = 0.5 * (amp_[i] + sgn * pa[i]);
        prob += std::norm(amp_[i]);
    }
    if (prob > 0.0) {
        const double inv = 1.0 / std::sqrt(prob);
        for (Amp& a : amp_) a *= inv;
    }
    return prob;
}

int DenseState::measure(const PauliString& p, Rng& rng) {
    const double p_plus = 0.5 * (1.0 + expectation(p));
    const int outcome = rng.uniform() < p_plus ? 1 : -1;
    project(p, outcome);
    return outcome;
}

DenseState project_stabilizers(int num_qubits, const std::vector<std::pair<PauliString, int>>& stabilizers) {
    DenseState s(num_qubits);
    for (int q = 0; q < num_qubits; ++q) {
        s.h(q);
        s.pauli_rotation(PauliString::single(q, Pauli::Z), 0.1 * (q + 1));
        s.pauli_rotation(PauliString::single(q, Pauli::X), 0.07 * (q + 2));
    }
    for (const auto& [op, value] : stabilizers) {
        DenseState trial = s;
        if (trial.project(op, value) > 1e-9) s = std::move(trial);
    }
    return s;
}

Eigen::MatrixXd correlation_from_state(const DenseState& state, const Encoding& enc) {
    const int m = enc.num_majoranas();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
    for (int x = 0; x < m; ++x)
        for (int y = x + 1; y < m; ++y) {
            g(x, y) = state.expectation(enc.bilinear(x, y));
            g(y, x) = -g(x, y);
        }
    return g;
}

}  // namespace kfs
