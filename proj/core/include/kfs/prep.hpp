#pragma once

#include <string>
#include <vector>

#include "kfs/lattice.hpp"
#include "kfs/noise.hpp"
#include "kfs/rng.hpp"
#include "kfs/tableau.hpp"

namespace kfs {

// ZXXZ32: one ancilla per plaquette measures Z X X Z (the first Z is
// implied by the |0> data), then a CY layer grows it to the hexagon.
// ZXXZ16: half as many ancillas in two rounds, even plaquette rows first;
// the second round needs the full four-gate ZXXZ.
// Hexagons: each ancilla measures its weight-6 plaquette directly.
enum class PrepMethod { ZXXZ32, ZXXZ16, Hexagons };

const char* to_string(PrepMethod m);
PrepMethod prep_method_from_string(const std::string& s);

struct PrepOutcome {
    CliffordState state;
    int num_data = 0;
    std::vector<int> ancilla_outcomes;  // per plaquette, +1/-1
    std::vector<int> corrections;       // data sites that received a Z
    std::vector<int> residual_defects;  // plaquettes the decoder could not fix
    std::vector<char> lost;             // per data site
    std::vector<char> lost_ancilla;     // per plaquette
    std::vector<int> column_parities;   // per plaquette column
    // Odd columns; always 0 on open lattices, whose columns end on a
    // boundary and carry no parity constraint.
    int violations = 0;
    int column_violations() const { return violations; }
};

// Throws InvalidPattern when a cylinder column has odd target product.
void validate_target(const Lattice& lattice, const std::vector<int>& target);

// Deterministic faults for fault-injection tests.
struct PrepInjection {
    // (plaquette, Pauli) applied to that plaquette's ancilla right before readout.
    std::vector<std::pair<int, Pauli>> before_readout;
    // (data site, Pauli) applied after the circuit.
    std::vector<std::pair<int, Pauli>> after_circuit;
};

PrepOutcome run_prep_circuit(const Lattice& lattice, PrepMethod method, const NoiseModel& noise,
                             const std::vector<int>& target, Rng& rng, const PrepInjection* inject = nullptr);

struct DecodeResult {
    std::vector<int> corrections;
    std::vector<int> residual;
};
// Pushes -1 defects (outcome x target) along each column with a random start
// and direction. With `strict`, an odd column throws UnpairableColumn;
// otherwise its last defect is reported as residual.
DecodeResult feedforward_decode(const Lattice& lattice, const std::vector<int>& outcomes,
                                const std::vector<int>& target, Rng& rng, bool strict = true);

std::vector<int> column_parities(const Lattice& lattice, const std::vector<int>& outcomes);
int column_parity_violations(const Lattice& lattice, const std::vector<int>& outcomes);

int measure_pauli(CliffordState& state, const PauliString& p, Rng& rng);

// Black site whose Z flips plaquette rows `row - 1` and `row` of column j.
int flip_site(const Lattice& lattice, int row, int column);

}  // namespace kfs
