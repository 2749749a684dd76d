#include "validate.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "kfs/chern.hpp"
#include "kfs/errors.hpp"
#include "kfs/experiments.hpp"
#include "kfs/gaussian.hpp"
#include "kfs/oracle.hpp"
#include "kfs/prep.hpp"
#include "kfs/protocols.hpp"

namespace kfs::cli {

namespace {

std::string within(const std::string& what, double got, double want, double tol) {
    if (std::abs(got - want) <= tol) return {};
    std::ostringstream os;
    os << what << " = " << got << ", expected " << want << " +- " << tol;
    return os.str();
}

DenseState dense_vacuum(const Encoding& enc) {
    DenseState s(enc.num_sites());
    for (int q = 0; q < s.num_qubits(); ++q) {
        s.h(q);
        s.pauli_rotation(PauliString::single(q, Pauli::Z), 0.1 * (q + 1));
        s.pauli_rotation(PauliString::single(q, Pauli::X), 0.07 * (q + 2));
    }
    for (const auto& st : enc.vacuum_stabilizers()) {
        DenseState trial = s;
        if (trial.project(st.op, st.value) > 1e-9) s = trial;
    }
    return s;
}

std::string plaquettes_commute() {
    const Lattice L = default_lattice();
    std::vector<PauliString> ops;
    for (std::size_t q = 0; q < L.plaquettes().size(); ++q) ops.push_back(plaquette_operator(L, static_cast<int>(q)));
    for (std::size_t l = 0; l < L.links().size(); ++l) {
        const PauliString link = link_operator(L, static_cast<int>(l));
        for (const auto& p : ops)
            if (!p.commutes(link)) return "a plaquette anticommutes with link " + std::to_string(l);
    }
    for (const auto& p : ops)
        for (const auto& q : ops)
            if (!p.commutes(q)) return "two plaquettes anticommute";
    return {};
}

std::string vacuum_pure() {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    const auto g = vacuum_state(enc);
    const double purity = (g * g + Eigen::MatrixXd::Identity(g.rows(), g.cols())).norm();
    if (purity > 1e-10) return "Gamma^2 + 1 has norm " + std::to_string(purity);
    return within("vacuum particle number", total_particle_number(g, enc), 0.0, 1e-10);
}

std::string layers_match_oracle() {
    const Lattice L = single_plaquette();
    const Encoding enc(L);
    auto g = vacuum_state(enc);
    DenseState s = dense_vacuum(enc);
    const double thetas[] = {0.31, -0.72, 1.0, 0.125, 0.6, -0.2, 0.9};
    for (int k = 0; k < 7; ++k) {
        const Layer layer = link_layer(L, static_cast<LinkType>(k % 3), thetas[k]);
        apply_layer(g, enc, layer);
        for (int l : layer.links) s.pauli_rotation(link_operator(L, l), thetas[k] * M_PI / 4.0);
    }
    return within("|Gamma - Gamma_oracle|", (g - correlation_from_state(s, enc)).norm(), 0.0, 1e-10);
}

std::string wick_matches_oracle() {
    const Lattice L = single_plaquette();
    const Encoding enc(L);
    auto g = vacuum_state(enc);
    DenseState s = dense_vacuum(enc);
    for (int k = 0; k < 5; ++k) {
        const Layer layer = link_layer(L, static_cast<LinkType>(k % 3), 0.23 + 0.1 * k);
        apply_layer(g, enc, layer);
        for (int l : layer.links) s.pauli_rotation(link_operator(L, l), layer.theta * M_PI / 4.0);
    }
    const auto p4 = enc.bilinear(0, 7) * enc.bilinear(3, 10);
    return within("four-Majorana string", *expect_pauli(g, enc, p4), s.expectation(p4), 1e-10);
}

std::string gate_identities() {
    for (int k = 0; k < 24; ++k) {
        const double theta = -1.5 + 0.13 * k;
        const auto a = zz_from_cp(theta);
        if (a.max_deviation > 1e-12) return "ZZ from CP at theta " + std::to_string(theta);
        const auto b = string_propagation(theta, 0.4 - 0.05 * k);
        if (b.max_deviation > 1e-12) return "string propagation at theta " + std::to_string(theta);
    }
    return {};
}

std::string noiseless_prep() {
    const Lattice L = default_lattice();
    const std::vector<int> target(L.plaquettes().size(), 1);
    for (PrepMethod m : {PrepMethod::ZXXZ32, PrepMethod::ZXXZ16, PrepMethod::Hexagons}) {
        Rng rng(11);
        const PrepOutcome o = run_prep_circuit(L, m, NoiseModel::noiseless(), target, rng);
        for (std::size_t q = 0; q < target.size(); ++q)
            if (o.state.peek(plaquette_operator(L, static_cast<int>(q))) != 1)
                return std::string(to_string(m)) + " left plaquette " + std::to_string(q) + " unprepared";
    }
    return {};
}

std::string chern_reference_states() {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    const auto target = floquet_target(enc, 0.25, 0.25, 0.25);
    const ChernResult b = chern_from_table(bulk_average(target, enc));
    if (auto e = within("Floquet target Chern number", b.chern, 1.0, 0.0); !e.empty()) return e;
    auto g = vacuum_state(enc);
    for (const Layer& l : phase_prep_circuit(L, abelian_ii_prep())) apply_layer(g, enc, l);
    return within("abelian state Chern number", chern_from_table(bulk_average(g, enc)).chern, 0.0, 0.0);
}

std::string exchange_contrast() {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    const auto plq = exchange_plaquette(enc);
    const auto vac = vacuum_state(enc);
    double target[2];
    int i = 0;
    for (auto v : {ExchangeVariant::HopAndReturn, ExchangeVariant::FullExchange}) {
        Rng rng(3);
        FermionRun run = start_from(enc, vac, NoiseModel::noiseless(), rng);
        run_exchange(run, plq, v, NoiseModel::noiseless(), rng);
        target[i++] = 0.5 * (density(run.gamma, enc, plq.a) + density(run.gamma, enc, plq.d));
    }
    return within("exchange contrast", target[0] - target[1], 1.0, 1e-10);
}

std::string hubbard_free_limit() {
    HubbardSpec s;
    s.u_angle = 0.0;
    s.rounds = 2;
    const auto free = hubbard_free(s);
    const auto dense = hubbard_interacting(s);
    for (std::size_t r = 0; r < free.size(); ++r)
        if (auto e = within("m_s round " + std::to_string(r), dense[r], free[r], 1e-8); !e.empty()) return e;
    return {};
}

std::string worker_determinism(int workers) {
    RunConfig c = default_config("fig2_prep");
    c.trajectories = 64;
    c.noise.p_ini = 0.02;
    c.noise.p_layer = 0.01;
    c.noise.loss_fraction_ini = 0.2;
    c.postselection.decoding_threshold = 1;
    auto csv = [&](int w) {
        c.workers = w;
        std::ostringstream os;
        write_summary_csv(os, run_preset(c).summary);
        return os.str();
    };
    const int other = std::max(workers, 3);
    if (csv(1) != csv(other)) return "summary CSV differs between 1 and " + std::to_string(other) + " workers";
    return {};
}

}  // namespace

std::vector<Check> invariant_checks(int workers) {
    return {
        {"plaquette operators commute with every link", plaquettes_commute},
        {"vacuum correlation matrix is pure and empty", vacuum_pure},
        {"Gaussian layers agree with the statevector", layers_match_oracle},
        {"Wick contractions agree with the statevector", wick_matches_oracle},
        {"gate identities hold to 1e-12", gate_identities},
        {"noiseless preparation reaches every target plaquette", noiseless_prep},
        {"reference Chern numbers (target 1, abelian 0)", chern_reference_states},
        {"noiseless exchange contrast is 1", exchange_contrast},
        {"interacting engine reduces to free fermions at U = 0", hubbard_free_limit},
        {"summary CSV independent of worker count", [workers] { return worker_determinism(workers); }},
    };
}

int run_checks(const std::vector<Check>& checks, std::ostream& os) {
    int failed = 0;
    for (const auto& c : checks) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string err;
        try {
            err = c.run();
        } catch (const std::exception& e) {
            err = std::string("threw: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        os << (err.empty() ? "PASS " : "FAIL ") << c.name << " (" << std::fixed << std::setprecision(2) << secs << " s)";
        if (!err.empty()) os << ": " << err, ++failed;
        os << '\n';
    }
    os << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
    return failed;
}

}  // namespace kfs::cli
