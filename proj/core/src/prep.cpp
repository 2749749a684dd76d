#include "kfs/prep.hpp"

#include <algorithm>

#include "kfs/errors.hpp"

namespace kfs {

const char* to_string(PrepMethod m) {
    switch (m) {
        case PrepMethod::ZXXZ32: return "ZXXZ32";
        case PrepMethod::ZXXZ16: return "ZXXZ16";
        case PrepMethod::Hexagons: return "Hexagons";
    }
    return "?";
}

PrepMethod prep_method_from_string(const std::string& s) {
    if (s == "ZXXZ32") return PrepMethod::ZXXZ32;
    if (s == "ZXXZ16") return PrepMethod::ZXXZ16;
    if (s == "Hexagons") return PrepMethod::Hexagons;
    throw SchemaError("unknown prep method '" + s + "'");
}

int flip_site(const Lattice& lattice, int row, int column) { return lattice.index_of(row, 2 * column + 2); }

void validate_target(const Lattice& lattice, const std::vector<int>& target) {
    if (target.size() != lattice.plaquettes().size()) throw InvalidPattern("target pattern has the wrong length");
    for (int t : target)
        if (t != 1 && t != -1) throw InvalidPattern("target entries must be +1 or -1");
    if (lattice.boundary() != Boundary::Cylinder) return;
    for (const auto& col : lattice.columns()) {
        int prod = 1;
        for (int p : col) prod *= target[static_cast<std::size_t>(p)];
        if (prod < 0) throw InvalidPattern("target pattern flips an odd number of plaquettes in a column");
    }
}

std::vector<int> column_parities(const Lattice& lattice, const std::vector<int>& outcomes) {
    std::vector<int> out;
    for (const auto& col : lattice.columns()) {
        int prod = 1;
        for (int p : col) prod *= outcomes[static_cast<std::size_t>(p)];
        out.push_back(prod);
    }
    return out;
}

int column_parity_violations(const Lattice& lattice, const std::vector<int>& outcomes) {
    if (lattice.boundary() != Boundary::Cylinder) return 0;
    int v = 0;
    for (int p : column_parities(lattice, outcomes)) v += p < 0;
    return v;
}

int measure_pauli(CliffordState& state, const PauliString& p, Rng& rng) {
    if (p.is_identity()) throw InvariantBreach("measure_pauli needs a nontrivial string");
    return state.measure(p, rng);
}

DecodeResult feedforward_decode(const Lattice& lattice, const std::vector<int>& outcomes,
                                const std::vector<int>& target, Rng& rng, bool strict) {
    DecodeResult res;
    const bool ring = lattice.boundary() == Boundary::Cylinder;
    for (std::size_t j = 0; j < lattice.columns().size(); ++j) {
        const auto& col = lattice.columns()[j];
        const int rows = static_cast<int>(col.size());
        std::vector<char> defect(static_cast<std::size_t>(rows));
        int count = 0;
        for (int r = 0; r < rows; ++r) {
            const auto p = static_cast<std::size_t>(col[static_cast<std::size_t>(r)]);
            defect[static_cast<std::size_t>(r)] = outcomes[p] * target[p] < 0;
            count += defect[static_cast<std::size_t>(r)];
        }
        // Drawn unconditionally so the stream position does not depend on
        // the outcomes of other columns.
        const int start = rng.below(rows);
        const int dir = rng.sign();
        if (count == 0) continue;
        if (ring && count % 2 && strict)
            throw UnpairableColumn("column " + std::to_string(j) + " has odd defect parity");
        const int jc = static_cast<int>(j);
        const int steps = ring ? rows - 1 : rows;
        for (int k = 0; k < steps; ++k) {
            const int r = ring ? ((start + dir * k) % rows + rows) % rows : (dir > 0 ? k : rows - 1 - k);
            if (!defect[static_cast<std::size_t>(r)]) continue;
            // Z on the black site below row r (dir +1) or above it (dir -1).
            const int site_row = dir > 0 ? r + 1 : r;
            res.corrections.push_back(flip_site(lattice, site_row, jc));
            defect[static_cast<std::size_t>(r)] = 0;
            const int next = dir > 0 ? r + 1 : r - 1;
            if (ring) {
                const int n = (next % rows + rows) % rows;
                defect[static_cast<std::size_t>(n)] ^= 1;
            } else if (next >= 0 && next < rows) {
                defect[static_cast<std::size_t>(next)] ^= 1;
            }
        }
        for (int r = 0; r < rows; ++r)
            if (defect[static_cast<std::size_t>(r)]) res.residual.push_back(col[static_cast<std::size_t>(r)]);
    }
    return res;
}

namespace {

enum class Gate { CX, CY, CZ };

class PrepRun {
public:
    PrepRun(const Lattice& lattice, const NoiseModel& noise, int num_ancilla_slots, Rng& rng)
        : noise_(noise),
          rng_(rng),
          n_(lattice.num_sites()),
          state_(lattice.num_sites() + num_ancilla_slots),
          lost_(static_cast<std::size_t>(lattice.num_sites() + num_ancilla_slots), 0) {}

    int data_count() const { return n_; }
    int total() const { return state_.num_qubits(); }
    bool lost(int q) const { return lost_[static_cast<std::size_t>(q)] != 0; }

    void fault(int q, double p, double loss_fraction) {
        if (lost(q)) return;
        const Fault f = sample_fault(p, loss_fraction, noise_.pauli_bias, rng_);
        if (f.kind == FaultKind::Pauli) {
            apply_single(q, f.pauli);
        } else if (f.kind == FaultKind::Loss) {
            lost_[static_cast<std::size_t>(q)] = 1;
            apply_single(q, static_cast<Pauli>(rng_.below(4)));
        }
    }

    void fault_range(int lo, int hi, double p, double loss_fraction) {
        if (p <= 0.0) return;
        for (int q = lo; q < hi; ++q) fault(q, p, loss_fraction);
    }

    void gate(Gate g, int c, int t) {
        if (c < 0 || t < 0 || lost(c) || lost(t)) return;
        switch (g) {
            case Gate::CX: state_.cx(c, t); break;
            case Gate::CY: state_.cy(c, t); break;
            case Gate::CZ: state_.cz(c, t); break;
        }
    }

    void prepare_plus(int q) {
        if (!lost(q)) state_.h(q);
    }

    void reset_plus(int q) {
        if (lost(q)) return;
        state_.reset(q, rng_);
        state_.h(q);
    }

    int measure_x(int q) {
        if (lost(q)) return rng_.sign();
        state_.h(q);
        return state_.measure(PauliString::single(q, Pauli::Z), rng_);
    }

    void z(int q) {
        if (q >= 0) state_.z(q);
    }

    void layer_noise() {
        if (noise_.profile == NoiseProfile::GateLayer) fault_range(0, total(), noise_.p_layer, noise_.loss_fraction_layer);
    }

    CliffordState& state() { return state_; }
    const std::vector<char>& lost_flags() const { return lost_; }

private:
  public:
    void apply_single(int q, Pauli p) {
        switch (p) {
            case Pauli::X: state_.x(q); break;
            case Pauli::Y: state_.y(q); break;
            case Pauli::Z: state_.z(q); break;
            case Pauli::I: break;
        }
    }

  private:
    const NoiseModel& noise_;
    Rng& rng_;
    int n_;
    CliffordState state_;
    std::vector<char> lost_;
};

Gate gate_for(char letter) {
    switch (letter) {
        case 'X': return Gate::CX;
        case 'Y': return Gate::CY;
        default: return Gate::CZ;
    }
}

// Z X X Z around plaquette (i, j): Z(i+1, 2j), X(i, 2j+2), X(i+1, 2j+2), Z(i, 2j+4).
void zxxz_layers(PrepRun& run, const Lattice& lat, const std::vector<int>& plaquettes,
                 const std::vector<int>& ancilla_of, bool include_first_z) {
    const int first = include_first_z ? 0 : 1;
    for (int slot = first; slot < 4; ++slot) {
        for (int p : plaquettes) {
            const Plaquette& pl = lat.plaquettes()[static_cast<std::size_t>(p)];
            const int i = pl.row, j = pl.col;
            const int a = ancilla_of[static_cast<std::size_t>(p)];
            switch (slot) {
                case 0: run.gate(Gate::CZ, a, lat.index_of(i + 1, 2 * j)); break;
                case 1: run.gate(Gate::CX, a, lat.index_of(i, 2 * j + 2)); break;
                case 2: run.gate(Gate::CX, a, lat.index_of(i + 1, 2 * j + 2)); break;
                case 3:
                    if (2 * j + 4 < lat.site_cols()) run.gate(Gate::CZ, a, lat.index_of(i, 2 * j + 4));
                    break;
            }
        }
        run.layer_noise();
    }
}

}  // namespace

PrepOutcome run_prep_circuit(const Lattice& lattice, PrepMethod method, const NoiseModel& noise,
                             const std::vector<int>& target, Rng& rng, const PrepInjection* inject) {
    validate_target(lattice, target);
    noise.validate();
    const int n = lattice.num_sites();
    const int np = static_cast<int>(lattice.plaquettes().size());

    std::vector<int> ancilla_of(static_cast<std::size_t>(np));
    std::vector<std::vector<int>> rounds;
    int slots = 0;
    if (method == PrepMethod::ZXXZ16) {
        rounds.resize(2);
        std::vector<int> slot_in_round(2, 0);
        for (int p = 0; p < np; ++p) {
            const int r = lattice.plaquettes()[static_cast<std::size_t>(p)].row % 2;
            rounds[static_cast<std::size_t>(r)].push_back(p);
            ancilla_of[static_cast<std::size_t>(p)] = n + slot_in_round[static_cast<std::size_t>(r)]++;
        }
        slots = std::max(slot_in_round[0], slot_in_round[1]);
    } else {
        rounds.resize(1);
        for (int p = 0; p < np; ++p) {
            rounds[0].push_back(p);
            ancilla_of[static_cast<std::size_t>(p)] = n + p;
        }
        slots = np;
    }

    PrepRun run(lattice, noise, slots, rng);
    const bool phen = noise.profile == NoiseProfile::Phenomenological;
    PrepOutcome out{CliffordState(0), n, std::vector<int>(static_cast<std::size_t>(np), 1), {}, {}, {}, {}, {}};

    // Initialization: data in |0>, ancillas in |+>.
    for (int q = n; q < n + slots; ++q) run.prepare_plus(q);
    run.fault_range(0, n + slots, noise.p_ini, noise.loss_fraction_ini);

    for (std::size_t r = 0; r < rounds.size(); ++r) {
        const auto& plist = rounds[r];
        if (r > 0) {
            for (int q = n; q < n + slots; ++q) run.reset_plus(q);
            run.fault_range(n, n + slots, noise.p_ini, noise.loss_fraction_ini);
        }
        if (method == PrepMethod::Hexagons) {
            // Walk positions in this order make every pair of neighbouring
            // hexagons meet their two shared sites in the same relative
            // order, so the ancilla phase kicks cancel.
            for (int k : {0, 1, 2, 5, 3, 4}) {
                for (int p : plist) {
                    const Plaquette& pl = lattice.plaquettes()[static_cast<std::size_t>(p)];
                    run.gate(gate_for(pl.letters[static_cast<std::size_t>(k)]), ancilla_of[static_cast<std::size_t>(p)],
                             pl.sites[static_cast<std::size_t>(k)]);
                }
                run.layer_noise();
            }
        } else {
            zxxz_layers(run, lattice, plist, ancilla_of, method == PrepMethod::ZXXZ16);
        }
        if (inject)
            for (const auto& [p, pauli] : inject->before_readout)
                if (std::find(plist.begin(), plist.end(), p) != plist.end())
                    run.apply_single(ancilla_of[static_cast<std::size_t>(p)], pauli);
        for (int p : plist) out.ancilla_outcomes[static_cast<std::size_t>(p)] = run.measure_x(ancilla_of[static_cast<std::size_t>(p)]);
        out.lost_ancilla.resize(static_cast<std::size_t>(np), 0);
        for (int p : plist) out.lost_ancilla[static_cast<std::size_t>(p)] = run.lost(ancilla_of[static_cast<std::size_t>(p)]);
    }

    out.column_parities = column_parities(lattice, out.ancilla_outcomes);
    out.violations = column_parity_violations(lattice, out.ancilla_outcomes);
    DecodeResult dec = feedforward_decode(lattice, out.ancilla_outcomes, target, rng, false);
    for (int s : dec.corrections) run.z(s);
    out.corrections = std::move(dec.corrections);
    out.residual_defects = std::move(dec.residual);

    if (method != PrepMethod::Hexagons) {
        // CY with control on the even-column site of each ZZ dimer.
        for (int r = 0; r < lattice.site_rows(); ++r)
            for (int c = 2; c < lattice.site_cols(); c += 2)
                run.gate(Gate::CY, lattice.index_of(r, c), lattice.index_of(r, c - 1));
        run.layer_noise();
    }
    if (phen) run.fault_range(0, n, noise.p_layer, noise.loss_fraction_layer);
    if (inject)
        for (const auto& [q, pauli] : inject->after_circuit) run.apply_single(q, pauli);

    out.lost.assign(run.lost_flags().begin(), run.lost_flags().begin() + n);
    out.state = std::move(run.state());
    return out;
}

}  // namespace kfs
