#include "kfs/noise.hpp"

#include <deque>

#include "kfs/errors.hpp"

namespace kfs {

NoiseModel NoiseModel::noiseless() {
    NoiseModel m;
    m.p_ini = 0.0;
    m.p_layer = 0.0;
    return m;
}

void NoiseModel::validate() const {
    for (double p : {p_ini, p_layer, loss_fraction_ini, loss_fraction_layer})
        if (!(p >= 0.0 && p <= 1.0)) throw SchemaError("noise probabilities and fractions must lie in [0, 1]");
    double total = 0.0;
    for (double w : pauli_bias) {
        if (!(w >= 0.0)) throw SchemaError("pauli_bias weights must be non-negative");
        total += w;
    }
    if (total <= 0.0) throw SchemaError("pauli_bias needs a positive weight");
}

Pauli sample_pauli(const std::array<double, 3>& bias, Rng& rng) {
    const double total = bias[0] + bias[1] + bias[2];
    const double u = rng.uniform() * total;
    if (u < bias[0]) return Pauli::X;
    if (u < bias[0] + bias[1]) return Pauli::Y;
    return Pauli::Z;
}

Fault sample_fault(double p, double loss_fraction, const std::array<double, 3>& bias, Rng& rng) {
    if (!rng.bernoulli(p)) return {};
    if (rng.bernoulli(loss_fraction)) return {FaultKind::Loss, Pauli::I};
    return {FaultKind::Pauli, sample_pauli(bias, rng)};
}

int apply_layer_noise(EvolutionFrame& frame, const std::vector<int>& sites, double p, double loss_fraction,
                      const std::array<double, 3>& bias, Rng& rng) {
    if (p <= 0.0) return 0;
    int newly_lost = 0;
    for (int s : sites) {
        if (frame.is_lost(s)) continue;
        const Fault f = sample_fault(p, loss_fraction, bias, rng);
        if (f.kind == FaultKind::Pauli) {
            frame.frame *= PauliString::single(s, f.pauli);
        } else if (f.kind == FaultKind::Loss) {
            if (frame.lost.empty()) throw InvariantBreach("loss record not sized");
            frame.lost[static_cast<std::size_t>(s)] = 1;
            ++newly_lost;
        }
    }
    return newly_lost;
}

std::vector<int> distances_from(const Lattice& lattice, const std::vector<int>& support, int max_distance) {
    const int cap = max_distance + 1;
    std::vector<int> dist(static_cast<std::size_t>(lattice.num_sites()), cap);
    std::deque<int> queue;
    for (int s : support) {
        if (dist[static_cast<std::size_t>(s)] == 0) continue;
        dist[static_cast<std::size_t>(s)] = 0;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        const int s = queue.front();
        queue.pop_front();
        const int d = dist[static_cast<std::size_t>(s)];
        if (d >= max_distance) continue;
        for (LinkType t : {LinkType::XX, LinkType::YY, LinkType::ZZ}) {
            const int l = lattice.link_at(s, t);
            if (l < 0) continue;
            const Link& link = lattice.links()[static_cast<std::size_t>(l)];
            const int o = link.a == s ? link.b : link.a;
            if (dist[static_cast<std::size_t>(o)] <= d + 1) continue;
            dist[static_cast<std::size_t>(o)] = d + 1;
            queue.push_back(o);
        }
    }
    return dist;
}

bool accept_loss(const Lattice& lattice, const std::vector<char>& lost, const std::vector<int>& support,
                 std::optional<int> radius) {
    if (!radius) return true;
    bool any = false;
    for (char c : lost) any = any || c;
    if (!any) return true;
    const auto dist = distances_from(lattice, support, *radius);
    for (std::size_t s = 0; s < lost.size() && s < dist.size(); ++s)
        if (lost[s] && dist[s] <= *radius) return false;
    return true;
}

bool accept_decoding(int column_violations, std::optional<int> threshold) {
    return !threshold || column_violations <= *threshold;
}

}  // namespace kfs
