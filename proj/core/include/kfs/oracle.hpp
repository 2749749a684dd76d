#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "kfs/pauli.hpp"
#include "kfs/rng.hpp"

namespace kfs {

class Encoding;

// Dense statevector for small systems; bit q of a basis index is qubit q.
// Used as a brute-force reference, so clarity wins over speed here.
class DenseState {
public:
    static constexpr int max_qubits = 22;
    using Amp = std::complex<double>;

    // |0...0>. Throws TooLarge above max_qubits.
    explicit DenseState(int num_qubits);

    int num_qubits() const { return n_; }
    const std::vector<Amp>& amplitudes() const { return amp_; }
    std::vector<Amp>& amplitudes() { return amp_; }
    double norm() const;

    void apply_1q(int q, const Eigen::Matrix2cd& u);
    void h(int q);
    void s(int q);
    void x(int q) { apply_pauli(PauliString::single(q, Pauli::X)); }
    void y(int q) { apply_pauli(PauliString::single(q, Pauli::Y)); }
    void z(int q) { apply_pauli(PauliString::single(q, Pauli::Z)); }
    void cx(int c, int t);
    void cy(int c, int t);
    void cz(int a, int b) { cp(a, b, 1.0); }
    // diag(1, 1, 1, exp(i pi theta)); CP(1) is CZ.
    void cp(int a, int b, double theta);
    void apply_pauli(const PauliString& p);
    // exp(i angle P) for Hermitian P.
    void pauli_rotation(const PauliString& p, double angle);

    double expectation(const PauliString& p) const;
    // Projects onto the eigenvalue picked with Born probability.
    int measure(const PauliString& p, Rng& rng);
    // Projects onto the given eigenvalue; returns its probability beforehand.
    double project(const PauliString& p, int outcome);

private:
    int n_;
    std::vector<Amp> amp_;
    std::vector<Amp> applied(const PauliString& p) const;
};

// Joint eigenstate of the given Pauli operators with the given eigenvalues,
// obtained by projecting a generic product state. Projections that would
// annihilate the state (operators dependent on earlier ones) are skipped.
DenseState project_stabilizers(int num_qubits, const std::vector<std::pair<PauliString, int>>& stabilizers);

// Gamma_xy = <i c_x c_y> read off a statevector through the encoding.
Eigen::MatrixXd correlation_from_state(const DenseState& state, const Encoding& enc);

}  // namespace kfs
