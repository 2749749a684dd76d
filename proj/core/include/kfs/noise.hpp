#pragma once

#include <array>
#include <optional>
#include <vector>

#include "kfs/gaussian.hpp"
#include "kfs/lattice.hpp"
#include "kfs/pauli.hpp"
#include "kfs/rng.hpp"

namespace kfs {

// Where the Clifford preparation circuit receives its faults.
enum class NoiseProfile {
    // p_ini on every qubit after initialization, p_layer on data after the
    // final CY layer (the main-text model).
    Phenomenological,
    // p_layer depolarizing on every qubit after each two-qubit gate layer.
    GateLayer,
};

struct NoiseModel {
    double p_ini = 0.1;
    double p_layer = 0.01;
    double loss_fraction_ini = 0.06;
    double loss_fraction_layer = 0.40;
    // Relative weights of X, Y, Z; normalized on use.
    std::array<double, 3> pauli_bias{1.0, 1.0, 1.0};
    // Deterministic offset added to every layer angle (coherent error knob).
    double angle_offset = 0.0;
    NoiseProfile profile = NoiseProfile::Phenomenological;

    static NoiseModel noiseless();
    bool is_noiseless() const { return p_ini == 0.0 && p_layer == 0.0 && angle_offset == 0.0; }
    // Throws SchemaError on probabilities outside [0, 1] or a zero bias.
    void validate() const;
};

struct PostselectionPolicy {
    std::optional<int> loss_radius;
    std::optional<int> decoding_threshold;
};

enum class FaultKind { None, Pauli, Loss };

struct Fault {
    FaultKind kind = FaultKind::None;
    Pauli pauli = Pauli::I;
};

// One fault draw with total probability p, a `loss_fraction` share of which
// is loss and the rest a Pauli drawn from the bias.
Fault sample_fault(double p, double loss_fraction, const std::array<double, 3>& bias, Rng& rng);
Pauli sample_pauli(const std::array<double, 3>& bias, Rng& rng);

// Samples faults on `sites` into the frame and loss record. Returns the
// number of newly lost sites.
int apply_layer_noise(EvolutionFrame& frame, const std::vector<int>& sites, double p, double loss_fraction,
                      const std::array<double, 3>& bias, Rng& rng);

// Graph distance (along links) from the support to every data site, capped
// at `max_distance` + 1.
std::vector<int> distances_from(const Lattice& lattice, const std::vector<int>& support, int max_distance);

// True when no lost site lies within `radius` links of the support.
bool accept_loss(const Lattice& lattice, const std::vector<char>& lost, const std::vector<int>& support,
                 std::optional<int> radius);
bool accept_decoding(int column_violations, std::optional<int> threshold);

}  // namespace kfs
