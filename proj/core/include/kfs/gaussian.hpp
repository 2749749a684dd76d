#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "kfs/encoding.hpp"
#include "kfs/lattice.hpp"
#include "kfs/pauli.hpp"

namespace kfs {

// Gamma_xy = (i/2) <[c_x, c_y]>, one row per Majorana of the encoding.
using CorrelationMatrix = Eigen::MatrixXd;

// H = (i/4) sum_xy c_x A_xy c_y with A real and skew-symmetric.
struct QuadraticHamiltonian {
    Eigen::MatrixXd a;
};

// One circuit layer: every listed link gets exp(i (theta pi / 4) K_l).
struct Layer {
    std::vector<int> links;
    double theta = 0.0;
};

struct FloquetCycle {
    std::vector<Layer> layers;
};

Layer link_layer(const Lattice& lattice, LinkType type, double theta);
// X, Y, Z layers in that order.
FloquetCycle xyz_cycle(const Lattice& lattice, double theta_x, double theta_y, double theta_z);
// The first `depth` layers of the periodically repeated cycle.
std::vector<Layer> repeat_layers(const FloquetCycle& cycle, int depth);

// Pauli frame and lost-qubit record carried along one noisy trajectory.
// A frame Pauli that anticommutes with a link flips the sign of that link's
// gates; gates that touch a lost qubit are dropped.
struct EvolutionFrame {
    PauliString frame;
    std::vector<char> lost;

    bool is_lost(int site) const { return !lost.empty() && lost[static_cast<std::size_t>(site)]; }
    bool any_lost(const PauliString& support) const;
    int sign_for(const PauliString& op) const { return frame.commutes(op) ? 1 : -1; }
};

CorrelationMatrix vacuum_state(const Encoding& enc);

enum class ZeroModePolicy { Throw, LeaveMixed };
// Minimum-energy state of H: Gamma = -polar(A), via real Schur blocks.
CorrelationMatrix ground_state(const QuadraticHamiltonian& h, ZeroModePolicy policy = ZeroModePolicy::Throw);
double energy(const QuadraticHamiltonian& h, const CorrelationMatrix& gamma);

// H = -sum_l J_type(l) K_l.
QuadraticHamiltonian link_hamiltonian(const Encoding& enc, double jx, double jy, double jz);

// Givens rotation exp(alpha G) in the (x, y) plane with G_yx = 1 = -G_xy.
Eigen::MatrixXd plane_rotation(int dim, int x, int y, double alpha);
void rotate_plane(CorrelationMatrix& gamma, int x, int y, double alpha);

void apply_layer(CorrelationMatrix& gamma, const Encoding& enc, const Layer& layer,
                 const EvolutionFrame* frame = nullptr);
// Single-particle orthogonal O with Gamma -> O Gamma O^T for the layer.
Eigen::MatrixXd layer_orthogonal(const Encoding& enc, const Layer& layer);
Eigen::MatrixXd cycle_orthogonal(const Encoding& enc, const FloquetCycle& cycle, int n_repeats = 1);

// exp(i angle P) for a Pauli string that is a single Majorana bilinear.
// Throws NotGaussian otherwise.
void string_rotation(CorrelationMatrix& gamma, const Encoding& enc, const PauliString& p, double angle);

double expect_majorana(const CorrelationMatrix& gamma, int x, int y, int frame_sign = 1);
// <P> for any Pauli string the encoding can express; nullopt otherwise.
std::optional<double> expect_pauli(const CorrelationMatrix& gamma, const Encoding& enc, const PauliString& p,
                                   const EvolutionFrame* frame = nullptr);

// Occupation of complex fermion k, (1 - <Z Z>) / 2 on its dimer.
double density(const CorrelationMatrix& gamma, const Encoding& enc, int pair);
double total_particle_number(const CorrelationMatrix& gamma, const Encoding& enc);
// <n_i n_j> - <n_i><n_j> by Wick contraction.
double density_density(const CorrelationMatrix& gamma, const Encoding& enc, int pair_i, int pair_j);

double pfaffian(Eigen::MatrixXd a);
CorrelationMatrix submatrix(const CorrelationMatrix& gamma, const std::vector<int>& idx);

// A_F with O = exp(A_F); throws LogBranchAmbiguity near eigenphase pi.
QuadraticHamiltonian effective_hamiltonian(const Encoding& enc, const FloquetCycle& cycle, int n_repeats = 1);
Eigen::MatrixXd real_log_orthogonal(const Eigen::MatrixXd& o);

// Spectral norm of [A, A_N] on the bulk Majoranas, where A_N generates the
// dimer particle number and A = log(P O^2) / 2. P flips the paired
// Majoranas so that a CZ-like Z layer does not sit on the log branch cut.
double particle_nonconservation(const Encoding& enc, const Eigen::MatrixXd& cycle_o);

// Majorana indices of data sites inside the lattice bulk region.
std::vector<int> bulk_majoranas(const Encoding& enc);

}  // namespace kfs
