#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "kfs/encoding.hpp"
#include "kfs/gaussian.hpp"
#include "kfs/rng.hpp"

namespace kfs {

// Bulk-averaged two-point Majorana table, stored directly as the parent
// Hamiltonian couplings A = -Gamma:
//   entry(dr, dc, l1, l2) = -Gamma(x_l1(R), x_l2(R + (dr, dc)))
// where R runs over bulk unit cells (Lattice::cell_site) and l = 0 is the
// even-column site, l = 1 the odd one. Offsets are limited to {-1, 0, 1}.
class StringTable {
public:
    static constexpr int kEntries = 36;
    static int key(int dr, int dc, int l1, int l2) { return ((dr + 1) * 3 + (dc + 1)) * 4 + l1 * 2 + l2; }
    static void unkey(int k, int& dr, int& dc, int& l1, int& l2);
    // Entries that carry information (the zero-offset diagonal is identically 0).
    static bool required(int k);

    void add(int k, double value, long long count = 1);
    void merge(const StringTable& other);
    double mean(int k) const { return count_[k] > 0 ? sum_[k] / double(count_[k]) : 0.0; }
    long long count(int k) const { return count_[k]; }
    double sum(int k) const { return sum_[k]; }
    // Throws InsufficientSamples when a required entry has no samples.
    void require_complete() const;

    double mean(int dr, int dc, int l1, int l2) const { return mean(key(dr, dc, l1, l2)); }

private:
    std::array<double, kEntries> sum_{};
    std::array<long long, kEntries> count_{};
};

// Precomputed Pauli strings that measure every table entry on every bulk cell.
class StringTableBuilder {
public:
    explicit StringTableBuilder(const Encoding& enc);

    struct Probe {
        int key;
        int a, b;             // Majorana indices, entry = -Gamma(a, b)
        PauliString string;   // measured operator, equal to i c_a c_b in the sector
        std::vector<int> support;
    };
    const std::vector<Probe>& probes() const { return probes_; }

    // Exact bulk average of one correlation matrix. With a frame, each probe
    // picks up the frame's commutation sign; with `lost` and a radius, probes
    // whose neighbourhood lost an atom are skipped. A non-null `shot_rng`
    // replaces every expectation by one projective +-1 outcome.
    StringTable average(const CorrelationMatrix& gamma, const EvolutionFrame* frame = nullptr,
                        std::optional<int> loss_radius = std::nullopt, Rng* shot_rng = nullptr) const;

private:
    const Encoding* enc_;
    std::vector<Probe> probes_;
};

StringTable bulk_average(const CorrelationMatrix& gamma, const Encoding& enc);

// Real-space couplings A^{l1 l2}_r for the nine offsets r = (dr, dc).
struct CouplingBlocks {
    // [key] -> coupling, same indexing as StringTable.
    std::array<double, StringTable::kEntries> a{};
    // Largest violation of the completion relations among entries that were
    // measured directly.
    double asymmetry_residual = 0.0;
    double at(int dr, int dc, int l1, int l2) const { return a[StringTable::key(dr, dc, l1, l2)]; }
};

// Takes the ee and eo blocks from the table and fills the rest:
//   A^{oe}_r = -A^{eo}_{-r}   (skew-symmetry of A)
//   A^{oo}_r = +A^{ee}_{-r}   (sublattice exchange of the honeycomb)
CouplingBlocks assemble_blocks(const StringTable& table);

// Two-band Bloch Hamiltonian h(k) = i A(k) on an n x n grid,
// k = 2 pi (a, b) / n with a along cell columns and b along rows.
struct BlochHamiltonian {
    int n = 5;
    std::vector<Eigen::Matrix2cd> h;  // index a * n + b
    const Eigen::Matrix2cd& at(int a, int b) const { return h[static_cast<std::size_t>(a * n + b)]; }
};

BlochHamiltonian fourier_bloch(const CouplingBlocks& blocks, int n = 5);

struct ChernResult {
    int chern = 0;
    int n = 0;
    std::vector<double> curvature;  // per grid plaquette, index a * n + b
    double min_gap = 0.0;
};

// Lattice field-strength evaluation over the lower band. Throws GaplessGrid
// when a gap falls below 1e-12. A non-null `twirl` multiplies every
// eigenvector by a random phase first (gauge-invariance checks).
ChernResult chern_number(const BlochHamiltonian& bh, Rng* twirl = nullptr);
ChernResult chern_from_table(const StringTable& table, int n = 5);

struct BootstrapChern {
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    int trials = 0;
    int gapless = 0;  // trials whose learned Hamiltonian closed the gap; scored 0
};

// Resamples `batch` per-snapshot tables with replacement, learns the Chern
// number of each pooled table, and reports the mean and 68% percentile band.
BootstrapChern bootstrap_chern(const std::vector<StringTable>& snapshots, int batch, int trials, Rng& rng);

std::string table_to_json(const StringTable& table);
std::string chern_to_json(const ChernResult& result);
// n rows of n comma-separated values; row a, column b.
std::string curvature_to_csv(const ChernResult& result);

}  // namespace kfs
