#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "kfs/chern.hpp"
#include "kfs/encoding.hpp"
#include "kfs/gaussian.hpp"
#include "kfs/noise.hpp"
#include "kfs/rng.hpp"

namespace kfs {

// ---------------------------------------------------------------------------
// Noisy free-fermion trajectories

// One trajectory of the fermionic pipeline: an ideal vacuum hit by a layer of
// initialization noise, then gates interleaved with layer noise. The column
// parity record is what the ancilla readout would have reported for the
// initial faults, so decoding postselection can be applied downstream.
struct FermionRun {
    const Encoding* enc = nullptr;
    CorrelationMatrix gamma;
    EvolutionFrame frame;
    std::vector<int> column_parities;
    int violations = 0;
};

FermionRun start_vacuum(const Encoding& enc, const NoiseModel& noise, Rng& rng);
// A run that starts from a given correlation matrix (noise applied the same way).
FermionRun start_from(const Encoding& enc, CorrelationMatrix gamma, const NoiseModel& noise, Rng& rng);

// Applies the layer with frame signs and loss, then p_layer noise on
// `noisy_sites` (all data sites when empty).
void run_layer(FermionRun& run, const Layer& layer, const NoiseModel& noise, Rng& rng,
               const std::vector<int>& noisy_sites = {});
// exp(i angle P) for a bilinear string, with frame sign and loss honoured.
void run_rotation(FermionRun& run, const PauliString& p, double angle);
// p_layer noise on the given sites (all data sites when empty).
void run_noise(FermionRun& run, const NoiseModel& noise, Rng& rng, const std::vector<int>& sites = {});

// Frame-corrected density of dimer k, or nullopt when the loss filter rejects it.
std::optional<double> run_density(const FermionRun& run, int pair, std::optional<int> loss_radius);

std::vector<int> dimer_sites(const Encoding& enc, int pair);

// ---------------------------------------------------------------------------
// Phase preparation (Fig. 3 class)

// Six link layers on top of the vacuum. `bases` gives the link type of each
// layer; angles are in units of pi/4 per link, so CP[c] corresponds to 2c.
struct PhasePrepSpec {
    std::string bases = "XYZXYZ";
    std::vector<double> angles;
};

std::vector<Layer> phase_prep_circuit(const Lattice& lattice, const PhasePrepSpec& spec);

// Canonical circuits. The abelian one uses the three published CP angles on
// X, Y, Z layers; the non-abelian one ships optimizer output.
PhasePrepSpec abelian_ii_prep();
PhasePrepSpec phase_b_prep();

// Floquet ground state of exp(A_F) for the isotropic cycle with per-layer
// angle theta. Zero modes (boundary Majoranas) are left mixed.
CorrelationMatrix floquet_target(const Encoding& enc, double theta_x, double theta_y, double theta_z);

// Normalized inner product of two tables over the required entries.
double table_overlap(const StringTable& a, const StringTable& b);

struct OptimizeResult {
    std::vector<double> angles;
    double objective = 0.0;
    int evaluations = 0;
    int restarts = 0;
    bool converged = false;
};

// Nelder-Mead (GSL nmsimplex2) over the layer angles, maximizing the table
// overlap with `target`. Restarts draw starting points from
// substream(seed, k, optimizer). Returns the best point found.
OptimizeResult optimize_prep_angles(const Encoding& enc, const StringTable& target, const std::string& bases,
                                    int restarts, std::uint64_t seed, double tol = 1e-7, int max_iter = 3000);

// ---------------------------------------------------------------------------
// Quench (Fig. 4b-e class)

struct QuenchSpec {
    double theta_xy = 0.125;
    double theta_z = 1.0;
    int depth = 12;
    // Reference dimer (row, column) and horizontal separation of the second
    // fermion in dimer units.
    int row = 1;
    int col = 3;
    int separation = 1;
    // A trailing Z layer commutes with the density readout and is skipped.
    bool omit_final_z = true;
};

struct QuenchLayout {
    int pair_a = -1, pair_b = -1;
    PauliString creation;
};
QuenchLayout quench_layout(const Encoding& enc, const QuenchSpec& spec);
// Layers of the quench circuit up to `depth`, honouring omit_final_z.
std::vector<Layer> quench_layers(const Lattice& lattice, const QuenchSpec& spec, int depth);

// Noiseless quench observables, all depths 0..depth.
struct QuenchTrace {
    std::vector<double> particle_number;
    std::vector<std::vector<double>> density;  // [depth][pair]
    // G_ij / n_i along the reference row at the final depth, j over the
    // dimer columns of that row.
    std::vector<double> g_row;
};
QuenchTrace quench_exact(const Encoding& enc, const QuenchSpec& spec);

// Magnitudes of G/n on the two horizontal neighbours of the reference dimer:
// "away" is the side opposite the partner fermion.
struct ExclusionAsymmetry {
    double away = 0.0;
    double toward = 0.0;
    double ratio() const { return toward > 0 ? away / toward : 0.0; }
};
ExclusionAsymmetry exclusion_asymmetry(const Encoding& enc, const QuenchSpec& spec, const QuenchTrace& trace);

// ---------------------------------------------------------------------------
// Exchange (Fig. 4f-g class)

enum class ExchangeVariant { HopAndReturn, FullExchange, Control0, Control2 };
const char* to_string(ExchangeVariant v);
ExchangeVariant exchange_variant_from_string(const std::string& s);

// Four dimers on a square: A=(r,j), B=(r,j+1), C=(r+1,j-1), D=(r+1,j).
// A-B and C-D share YY links, A-C and B-D share XX links.
struct ExchangePlaquette {
    int a = -1, b = -1, c = -1, d = -1;
    PauliString creation;  // flips the A and D dimers
    std::vector<int> sites;
    // hop_strings for the A-B, C-D, A-C and B-D hops, in that order.
    std::array<std::array<PauliString, 2>, 4> hops;
};
ExchangePlaquette exchange_plaquette(const Encoding& enc, int row = 1, int col = 3);

// Number-conserving transfer between two dimers joined by one link:
// exp(i pi/4 S2) exp(i pi/4 S4) with S2 the link and S4 its dressed partner.
std::array<PauliString, 2> hop_strings(const Encoding& enc, int pair_i, int pair_j);

// Runs one variant on `run`, with noise on the plaquette sites.
void run_exchange(FermionRun& run, const ExchangePlaquette& plq, ExchangeVariant v, const NoiseModel& noise,
                  Rng& rng);

// ---------------------------------------------------------------------------
// Fermi-Hubbard (Fig. 5 class)

struct HubbardSpec {
    double theta_hop = 0.125;
    double theta_z = 1.0;
    // Interaction-layer angle: exp(i u_angle pi/4 (ZZ)_up (ZZ)_down) per site.
    double u_angle = 0.0;
    int rounds = 4;
    // 2x2 dimers per spin on a 1x4 open strip (oracle-sized) or 4x4 per spin
    // on the default lattice with its seam links switched off.
    bool small = true;
};

struct HubbardLayout {
    Lattice lattice;
    int half = 0;                  // dimer columns [0, half) are spin up
    std::vector<int> up, down;     // dimer indices of mirrored sites
    std::vector<int> stagger;      // +-1 checkerboard sign per site
    std::vector<int> cut_links;    // XX/YY links switched off
};
HubbardLayout hubbard_layout(bool small);

// Gaussian evolution (u_angle must be 0). m_s after every round.
std::vector<double> hubbard_free(const HubbardSpec& spec);
// Statevector evolution with the interaction. Throws TooLarge beyond the oracle.
std::vector<double> hubbard_interacting(const HubbardSpec& spec);
// Dispatches on u_angle.
std::vector<double> hubbard(const HubbardSpec& spec);

// ---------------------------------------------------------------------------
// Gate identities

struct GateIdentityRecord {
    double theta = 0.0;
    std::string sequence;
    double max_deviation = 0.0;
};
// CP[theta/2] (X X) CP[theta/2] (X X) = exp(i pi theta / 4) exp(i theta pi/4 Z Z).
GateIdentityRecord zz_from_cp(double theta);
// ZZ(t) exp(i phi X1) ZZ(t) = ZZ(2t) exp(i phi (cos(t pi/2) X1 + sin(t pi/2) Y1 Z2)).
GateIdentityRecord string_propagation(double theta, double phi);

}  // namespace kfs
