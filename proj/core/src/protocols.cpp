#include "kfs/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "kfs/errors.hpp"
#include "kfs/prep.hpp"

namespace kfs {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;

std::vector<int> all_sites(const Lattice& L) {
    std::vector<int> s(static_cast<std::size_t>(L.num_sites()));
    for (int i = 0; i < L.num_sites(); ++i) s[static_cast<std::size_t>(i)] = i;
    return s;
}

LinkType basis_of(char c) {
    switch (c) {
        case 'X': case 'x': return LinkType::XX;
        case 'Y': case 'y': return LinkType::YY;
        case 'Z': case 'z': return LinkType::ZZ;
        default: throw SchemaError(std::string("unknown layer basis '") + c + "'");
    }
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<int> dimer_sites(const Encoding& enc, int pair) {
    const auto& p = enc.fermions().pairs.at(static_cast<std::size_t>(pair));
    return {p.first, p.second};
}

FermionRun start_from(const Encoding& enc, CorrelationMatrix gamma, const NoiseModel& noise, Rng& rng) {
    const Lattice& L = enc.lattice();
    FermionRun run;
    run.enc = &enc;
    run.gamma = std::move(gamma);
    run.frame.lost.assign(static_cast<std::size_t>(L.num_sites()), 0);
    apply_layer_noise(run.frame, all_sites(L), noise.p_ini, noise.loss_fraction_ini, noise.pauli_bias, rng);

    // Ancilla record: a plaquette reads -1 when the initial faults anticommute
    // with it, or when its own ancilla took an X-basis flip or was lost.
    const auto& plaqs = L.plaquettes();
    std::vector<int> outcome(plaqs.size(), 1);
    for (std::size_t p = 0; p < plaqs.size(); ++p) {
        if (!run.frame.frame.commutes(plaquette_operator(L, static_cast<int>(p)))) outcome[p] = -outcome[p];
        const Fault f = sample_fault(noise.p_ini, noise.loss_fraction_ini, noise.pauli_bias, rng);
        const bool flip = (f.kind == FaultKind::Loss && rng.bit()) ||
                          (f.kind == FaultKind::Pauli && f.pauli != Pauli::X);
        if (flip) outcome[p] = -outcome[p];
    }
    run.column_parities = column_parities(L, outcome);
    run.violations = column_parity_violations(L, outcome);
    return run;
}

FermionRun start_vacuum(const Encoding& enc, const NoiseModel& noise, Rng& rng) {
    return start_from(enc, vacuum_state(enc), noise, rng);
}

void run_noise(FermionRun& run, const NoiseModel& noise, Rng& rng, const std::vector<int>& sites) {
    const auto& targets = sites.empty() ? all_sites(run.enc->lattice()) : sites;
    apply_layer_noise(run.frame, targets, noise.p_layer, noise.loss_fraction_layer, noise.pauli_bias, rng);
}

void run_layer(FermionRun& run, const Layer& layer, const NoiseModel& noise, Rng& rng,
               const std::vector<int>& noisy_sites) {
    Layer l = layer;
    l.theta += noise.angle_offset;
    apply_layer(run.gamma, *run.enc, l, &run.frame);
    run_noise(run, noise, rng, noisy_sites);
}

void run_rotation(FermionRun& run, const PauliString& p, double angle) {
    if (run.frame.any_lost(p)) return;
    string_rotation(run.gamma, *run.enc, p, angle * run.frame.sign_for(p));
}

std::optional<double> run_density(const FermionRun& run, int pair, std::optional<int> loss_radius) {
    const auto sites = dimer_sites(*run.enc, pair);
    for (int s : sites)
        if (run.frame.is_lost(s)) return std::nullopt;
    if (!accept_loss(run.enc->lattice(), run.frame.lost, sites, loss_radius)) return std::nullopt;
    const double n = density(run.gamma, *run.enc, pair);
    const int l = run.enc->lattice().link_between(sites[0], sites[1]);
    return run.frame.sign_for(link_operator(run.enc->lattice(), l)) > 0 ? n : 1.0 - n;
}

// ---------------------------------------------------------------------------

std::vector<Layer> phase_prep_circuit(const Lattice& lattice, const PhasePrepSpec& spec) {
    if (spec.bases.size() != spec.angles.size())
        throw SchemaError("phase preparation needs one angle per layer basis");
    std::vector<Layer> layers;
    for (std::size_t k = 0; k < spec.angles.size(); ++k) {
        if (!std::isfinite(spec.angles[k])) throw SchemaError("layer angles must be finite");
        layers.push_back(link_layer(lattice, basis_of(spec.bases[k]), spec.angles[k]));
    }
    return layers;
}

PhasePrepSpec abelian_ii_prep() {
    // CP[-0.0625], CP[-0.0625], CP[-0.3125] on the X, Y, Z layers.
    return {"XYZ", {-0.125, -0.125, -0.625}};
}

PhasePrepSpec phase_b_prep() {
    // optimize_prep_angles(enc, floquet table at theta = 0.25, "XYZXYZ",
    // 40 restarts, seed 7) on the default lattice; overlap 0.988696.
    return {"XYZXYZ", {0.720794, -0.285276, 0.446031, -1.029792, -0.182774, 0.001233}};
}

CorrelationMatrix floquet_target(const Encoding& enc, double theta_x, double theta_y, double theta_z) {
    const auto h = effective_hamiltonian(enc, xyz_cycle(enc.lattice(), theta_x, theta_y, theta_z));
    return ground_state(h, ZeroModePolicy::LeaveMixed);
}

double table_overlap(const StringTable& a, const StringTable& b) {
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (int k = 0; k < StringTable::kEntries; ++k) {
        if (!StringTable::required(k)) continue;
        ab += a.mean(k) * b.mean(k);
        aa += a.mean(k) * a.mean(k);
        bb += b.mean(k) * b.mean(k);
    }
    return (aa > 0 && bb > 0) ? ab / std::sqrt(aa * bb) : 0.0;
}

// ---------------------------------------------------------------------------

QuenchLayout quench_layout(const Encoding& enc, const QuenchSpec& spec) {
    if (spec.depth < 0) throw SchemaError("quench depth must be non-negative");
    if (spec.separation < 1) throw SchemaError("fermion separation must be at least 1");
    QuenchLayout out;
    const auto& f = enc.fermions();
    out.pair_a = f.pair_at(spec.row, spec.col);
    out.pair_b = f.pair_at(spec.row, spec.col + spec.separation);
    if (out.pair_a < 0 || out.pair_b < 0) throw InvalidGeometry("quench fermions fall outside the dimer grid");
    out.creation = enc.pair_creation_string(out.pair_a, out.pair_b);
    return out;
}

std::vector<Layer> quench_layers(const Lattice& lattice, const QuenchSpec& spec, int depth) {
    const FloquetCycle cycle = xyz_cycle(lattice, spec.theta_xy, spec.theta_xy, spec.theta_z);
    std::vector<Layer> layers = repeat_layers(cycle, depth);
    if (spec.omit_final_z && !layers.empty() && depth % 3 == 0) layers.pop_back();
    return layers;
}

QuenchTrace quench_exact(const Encoding& enc, const QuenchSpec& spec) {
    const QuenchLayout lay = quench_layout(enc, spec);
    const int npairs = static_cast<int>(enc.fermions().pairs.size());
    CorrelationMatrix g = vacuum_state(enc);
    string_rotation(g, enc, lay.creation, std::numbers::pi / 2);

    const FloquetCycle cycle = xyz_cycle(enc.lattice(), spec.theta_xy, spec.theta_xy, spec.theta_z);
    const auto layers = repeat_layers(cycle, spec.depth);
    QuenchTrace out;
    auto record = [&](const CorrelationMatrix& gm) {
        std::vector<double> n(static_cast<std::size_t>(npairs));
        for (int k = 0; k < npairs; ++k) n[static_cast<std::size_t>(k)] = density(gm, enc, k);
        out.particle_number.push_back(total_particle_number(gm, enc));
        out.density.push_back(std::move(n));
    };
    record(g);
    for (int d = 1; d <= spec.depth; ++d) {
        const Layer& l = layers[static_cast<std::size_t>(d - 1)];
        // The trailing Z layer commutes with every density; reusing the
        // previous state keeps the depth-(3m) point identical to 3m - 1.
        if (!(spec.omit_final_z && d == spec.depth && d % 3 == 0)) apply_layer(g, enc, l);
        record(g);
    }
    const auto& f = enc.fermions();
    const double n_ref = out.density.back()[static_cast<std::size_t>(lay.pair_a)];
    for (int j = 0; j < f.grid_cols; ++j) {
        const int k = f.pair_at(spec.row, j);
        if (k < 0 || k == lay.pair_a) {
            out.g_row.push_back(0.0);
            continue;
        }
        out.g_row.push_back(density_density(g, enc, lay.pair_a, k) / n_ref);
    }
    return out;
}

ExclusionAsymmetry exclusion_asymmetry(const Encoding&, const QuenchSpec& spec, const QuenchTrace& trace) {
    ExclusionAsymmetry out;
    const int away = spec.col - 1, toward = spec.col + 1;
    if (away < 0 || toward >= static_cast<int>(trace.g_row.size()))
        throw InvalidGeometry("reference dimer needs neighbours on both sides");
    out.away = std::abs(trace.g_row[static_cast<std::size_t>(away)]);
    out.toward = std::abs(trace.g_row[static_cast<std::size_t>(toward)]);
    return out;
}

// ---------------------------------------------------------------------------

const char* to_string(ExchangeVariant v) {
    switch (v) {
        case ExchangeVariant::HopAndReturn: return "hop_and_return";
        case ExchangeVariant::FullExchange: return "full_exchange";
        case ExchangeVariant::Control0: return "control0";
        case ExchangeVariant::Control2: return "control2";
    }
    return "?";
}

ExchangeVariant exchange_variant_from_string(const std::string& s) {
    for (auto v : {ExchangeVariant::HopAndReturn, ExchangeVariant::FullExchange, ExchangeVariant::Control0,
                   ExchangeVariant::Control2})
        if (s == to_string(v)) return v;
    throw SchemaError("unknown exchange variant '" + s + "'");
}

ExchangePlaquette exchange_plaquette(const Encoding& enc, int row, int col) {
    const auto& f = enc.fermions();
    ExchangePlaquette p;
    p.a = f.pair_at(row, col);
    p.b = f.pair_at(row, col + 1);
    p.c = f.pair_at(row + 1, col - 1);
    p.d = f.pair_at(row + 1, col);
    if (p.a < 0 || p.b < 0 || p.c < 0 || p.d < 0) throw InvalidGeometry("exchange plaquette outside the dimer grid");
    p.creation = enc.pair_creation_string(p.a, p.d);
    for (int k : {p.a, p.b, p.c, p.d})
        for (int s : dimer_sites(enc, k)) p.sites.push_back(s);
    for (const auto& t : p.creation.terms())
        if (std::find(p.sites.begin(), p.sites.end(), t.first) == p.sites.end()) p.sites.push_back(t.first);
    std::sort(p.sites.begin(), p.sites.end());
    p.hops = {hop_strings(enc, p.a, p.b), hop_strings(enc, p.c, p.d), hop_strings(enc, p.a, p.c),
              hop_strings(enc, p.b, p.d)};
    return p;
}

std::array<PauliString, 2> hop_strings(const Encoding& enc, int pair_i, int pair_j) {
    const Lattice& L = enc.lattice();
    const auto si = dimer_sites(enc, pair_i), sj = dimer_sites(enc, pair_j);
    int link = -1;
    for (int a : si)
        for (int b : sj)
            if (link < 0) link = L.link_between(a, b);
    if (link < 0) throw InvalidGeometry("hop needs two dimers joined by a link");
    const PauliString s2 = link_operator(L, link);
    const PauliString zi = link_operator(L, L.link_between(si[0], si[1]));
    const PauliString zj = link_operator(L, L.link_between(sj[0], sj[1]));
    PauliString s4 = zi * s2 * zj;
    if (!s4.is_hermitian()) s4 = s4.times_i();

    // Of +-S4 exactly one combination commutes with the particle number;
    // pick it by checking that the vacuum stays empty.
    for (int sign : {1, -1}) {
        const PauliString cand = sign > 0 ? s4 : -s4;
        CorrelationMatrix g = vacuum_state(enc);
        string_rotation(g, enc, s2, kQuarterPi / 2);
        string_rotation(g, enc, cand, kQuarterPi / 2);
        if (std::abs(density(g, enc, pair_i)) < 1e-9 && std::abs(density(g, enc, pair_j)) < 1e-9) return {s2, cand};
    }
    throw InvariantBreach("no number-conserving hop between the dimers");
}

void run_exchange(FermionRun& run, const ExchangePlaquette& plq, ExchangeVariant v, const NoiseModel& noise,
                  Rng& rng) {
    auto noise_layers = [&](int k) {
        for (int i = 0; i < k; ++i) run_noise(run, noise, rng, plq.sites);
    };
    auto create = [&] {
        run_rotation(run, plq.creation, kQuarterPi + noise.angle_offset);
        noise_layers(3);
    };
    auto hop = [&](const std::array<PauliString, 2>& s, double sign) {
        run_rotation(run, s[0], sign * kQuarterPi);
        run_rotation(run, s[1], sign * kQuarterPi);
    };
    auto hop_yy = [&](double sign) {
        hop(plq.hops[0], sign);
        hop(plq.hops[1], sign);
        noise_layers(4);
    };
    auto hop_xx = [&](double sign) {
        hop(plq.hops[2], sign);
        hop(plq.hops[3], sign);
        noise_layers(4);
    };

    switch (v) {
        case ExchangeVariant::Control0:
            hop_yy(1.0);
            break;
        case ExchangeVariant::Control2:
            create();
            create();
            hop_yy(1.0);
            break;
        case ExchangeVariant::HopAndReturn:
            create();
            hop_yy(1.0);
            hop_yy(-1.0);
            create();
            break;
        case ExchangeVariant::FullExchange:
            create();
            hop_yy(1.0);
            hop_xx(1.0);
            create();
            break;
    }
}

// ---------------------------------------------------------------------------

namespace {

using Mat4 = Eigen::Matrix4cd;

Mat4 kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Mat4 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

// Qubit 1 is the most significant factor of the Kronecker product.
struct Paulis {
    Eigen::Matrix2cd i, x, y, z;
    Paulis() {
        using C = std::complex<double>;
        i = Eigen::Matrix2cd::Identity();
        x << 0, 1, 1, 0;
        y << 0, C(0, -1), C(0, 1), 0;
        z << 1, 0, 0, -1;
    }
};

Mat4 expi(const Mat4& generator, double angle) {
    const Mat4 m = std::complex<double>(0.0, angle) * generator;
    return m.exp();
}

}  // namespace

GateIdentityRecord zz_from_cp(double theta) {
    const Paulis p;
    Mat4 cp = Mat4::Identity();
    cp(3, 3) = std::polar(1.0, std::numbers::pi * theta / 2.0);
    const Mat4 xx = kron(p.x, p.x);
    const Mat4 lhs = cp * xx * cp * xx;
    const Mat4 rhs = std::polar(1.0, std::numbers::pi * theta / 4.0) * expi(kron(p.z, p.z), theta * kQuarterPi);
    GateIdentityRecord r;
    r.theta = theta;
    r.sequence = "CP[" + std::to_string(theta / 2) + "] XX CP[" + std::to_string(theta / 2) + "] XX";
    r.max_deviation = (lhs - rhs).cwiseAbs().maxCoeff();
    return r;
}

GateIdentityRecord string_propagation(double theta, double phi) {
    const Paulis p;
    const Mat4 zz = kron(p.z, p.z);
    const Mat4 x1 = kron(p.x, p.i);
    const Mat4 y1z2 = kron(p.y, p.z);
    const Mat4 zz1 = expi(zz, theta * kQuarterPi);
    const Mat4 lhs = zz1 * expi(x1, phi) * zz1;
    const double a = theta * std::numbers::pi / 2.0;
    const Mat4 rhs = expi(zz, 2.0 * theta * kQuarterPi) * expi(std::cos(a) * x1 + std::sin(a) * y1z2, phi);
    GateIdentityRecord r;
    r.theta = theta;
    r.sequence = "ZZ(t) exp(i phi X1) ZZ(t)";
    r.max_deviation = (lhs - rhs).cwiseAbs().maxCoeff();
    return r;
}

}  // namespace kfs
