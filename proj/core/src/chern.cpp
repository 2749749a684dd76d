#include "kfs/chern.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "kfs/errors.hpp"
#include "kfs/noise.hpp"
#include "kfs/trajectories.hpp"

namespace kfs {

void StringTable::unkey(int k, int& dr, int& dc, int& l1, int& l2) {
    const int off = k / 4;
    dr = off / 3 - 1;
    dc = off % 3 - 1;
    l1 = (k % 4) / 2;
    l2 = k % 2;
}

bool StringTable::required(int k) {
    int dr, dc, l1, l2;
    unkey(k, dr, dc, l1, l2);
    return !(dr == 0 && dc == 0 && l1 == l2);
}

void StringTable::add(int k, double value, long long count) {
    sum_[static_cast<std::size_t>(k)] += value;
    count_[static_cast<std::size_t>(k)] += count;
}

void StringTable::merge(const StringTable& other) {
    for (int k = 0; k < kEntries; ++k) {
        sum_[static_cast<std::size_t>(k)] += other.sum_[static_cast<std::size_t>(k)];
        count_[static_cast<std::size_t>(k)] += other.count_[static_cast<std::size_t>(k)];
    }
}

void StringTable::require_complete() const {
    for (int k = 0; k < kEntries; ++k) {
        if (required(k) && count_[static_cast<std::size_t>(k)] == 0) {
            int dr, dc, l1, l2;
            unkey(k, dr, dc, l1, l2);
            std::ostringstream os;
            os << "no accepted samples for offset (" << dr << ", " << dc << ") sublattices " << l1 << l2;
            throw InsufficientSamples(os.str());
        }
    }
}

StringTableBuilder::StringTableBuilder(const Encoding& enc) : enc_(&enc) {
    const Lattice& L = enc.lattice();
    const int lo = L.bulk_col_lo(), hi = L.bulk_col_hi();
    for (int r = 0; r < L.site_rows(); ++r) {
        for (int j = 0; j < L.cell_cols(); ++j) {
            const int e = L.cell_site(r, j, 0), o = L.cell_site(r, j, 1);
            if (e < 0 || o < 0) continue;
            if (L.site(o).col < lo || L.site(e).col > hi) continue;
            for (int k = 0; k < StringTable::kEntries; ++k) {
                if (!StringTable::required(k)) continue;
                int dr, dc, l1, l2;
                StringTable::unkey(k, dr, dc, l1, l2);
                if (L.boundary() == Boundary::Open && (r + dr < 0 || r + dr >= L.site_rows())) continue;
                const int a = L.cell_site(r, j, l1);
                const int b = L.cell_site(r + dr, j + dc, l2);
                if (b < 0 || a == b) continue;
                Probe p{k, a, b, enc.bilinear_short(a, b), {}};
                for (const auto& t : p.string.terms()) p.support.push_back(t.first);
                probes_.push_back(std::move(p));
            }
        }
    }
    if (probes_.empty()) throw InvalidGeometry("lattice has no bulk unit cells");
}

StringTable StringTableBuilder::average(const CorrelationMatrix& gamma, const EvolutionFrame* frame,
                                        std::optional<int> loss_radius, Rng* shot_rng) const {
    StringTable t;
    const bool check_loss = frame && loss_radius && !frame->lost.empty();
    for (const Probe& p : probes_) {
        if (check_loss && !accept_loss(enc_->lattice(), frame->lost, p.support, loss_radius)) continue;
        double v = gamma(p.a, p.b);
        if (frame) v *= frame->sign_for(p.string);
        if (shot_rng) v = shot_rng->bernoulli(0.5 * (1.0 + v)) ? 1.0 : -1.0;
        t.add(p.key, -v);
    }
    return t;
}

StringTable bulk_average(const CorrelationMatrix& gamma, const Encoding& enc) {
    StringTable t = StringTableBuilder(enc).average(gamma);
    t.require_complete();
    return t;
}

CouplingBlocks assemble_blocks(const StringTable& table) {
    CouplingBlocks out;
    using T = StringTable;
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            const double ee = table.mean(dr, dc, 0, 0);
            const double eo = table.mean(dr, dc, 0, 1);
            out.a[T::key(dr, dc, 0, 0)] = ee;
            out.a[T::key(dr, dc, 0, 1)] = eo;
            out.a[T::key(-dr, -dc, 1, 0)] = -eo;
            out.a[T::key(-dr, -dc, 1, 1)] = ee;
        }
    }
    double res = 0.0;
    for (int k = 0; k < T::kEntries; ++k) {
        if (!T::required(k) || table.count(k) == 0) continue;
        res = std::max(res, std::abs(table.mean(k) - out.a[k]));
    }
    out.asymmetry_residual = res;
    return out;
}

BlochHamiltonian fourier_bloch(const CouplingBlocks& blocks, int n) {
    if (n < 3) throw SchemaError("Brillouin-zone grid must be at least 3 x 3");
    BlochHamiltonian bh;
    bh.n = n;
    bh.h.resize(static_cast<std::size_t>(n * n));
    const std::complex<double> I(0.0, 1.0);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const double ka = 2.0 * std::numbers::pi * a / n, kb = 2.0 * std::numbers::pi * b / n;
            Eigen::Matrix2cd ak = Eigen::Matrix2cd::Zero();
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    const std::complex<double> phase = std::exp(I * (ka * dc + kb * dr));
                    for (int l1 = 0; l1 < 2; ++l1)
                        for (int l2 = 0; l2 < 2; ++l2) ak(l1, l2) += blocks.at(dr, dc, l1, l2) * phase;
                }
            Eigen::Matrix2cd h = I * ak;
            bh.h[static_cast<std::size_t>(a * n + b)] = 0.5 * (h + h.adjoint());
        }
    }
    return bh;
}

ChernResult chern_number(const BlochHamiltonian& bh, Rng* twirl) {
    const int n = bh.n;
    ChernResult out;
    out.n = n;
    out.min_gap = std::numeric_limits<double>::infinity();
    std::vector<Eigen::Vector2cd> lower(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n * n; ++i) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(bh.h[static_cast<std::size_t>(i)]);
        const auto& w = es.eigenvalues();
        out.min_gap = std::min(out.min_gap, w(1) - w(0));
        lower[static_cast<std::size_t>(i)] = es.eigenvectors().col(0);
        if (twirl) lower[static_cast<std::size_t>(i)] *= std::polar(1.0, 2.0 * std::numbers::pi * twirl->uniform());
    }
    if (!(out.min_gap > 1e-12)) throw GaplessGrid("band gap closes on the momentum grid");

    auto u = [&](int a, int b) -> const Eigen::Vector2cd& {
        return lower[static_cast<std::size_t>(((a % n + n) % n) * n + (b % n + n) % n)];
    };
    out.curvature.resize(static_cast<std::size_t>(n * n));
    double total = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const std::complex<double> loop = u(a, b).dot(u(a + 1, b)) * u(a + 1, b).dot(u(a + 1, b + 1)) *
                                              u(a + 1, b + 1).dot(u(a, b + 1)) * u(a, b + 1).dot(u(a, b));
            const double f = std::arg(loop);
            out.curvature[static_cast<std::size_t>(a * n + b)] = f;
            total += f;
        }
    }
    const double c = total / (2.0 * std::numbers::pi);
    out.chern = static_cast<int>(std::lround(c));
    if (std::abs(c - out.chern) > 1e-9) throw InvariantBreach("lattice curvature does not sum to an integer");
    return out;
}

ChernResult chern_from_table(const StringTable& table, int n) {
    return chern_number(fourier_bloch(assemble_blocks(table), n));
}

BootstrapChern bootstrap_chern(const std::vector<StringTable>& snapshots, int batch, int trials, Rng& rng) {
    if (trials < 1) throw SchemaError("bootstrap needs at least one trial");
    if (snapshots.empty()) throw InsufficientSamples("no snapshots to resample");
    BootstrapChern out;
    out.trials = trials;
    const int m = static_cast<int>(snapshots.size());
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        StringTable pooled;
        for (int i = 0; i < batch; ++i) pooled.merge(snapshots[static_cast<std::size_t>(rng.below(m))]);
        double c = 0.0;
        try {
            c = chern_from_table(pooled).chern;
        } catch (const GaplessGrid&) {
            ++out.gapless;
        }
        values.push_back(c);
    }
    const double sum = std::accumulate(values.begin(), values.end(), 0.0);
    out.mean = sum / trials;
    std::sort(values.begin(), values.end());
    const auto pick = [&](double q) {
        const auto i = static_cast<std::size_t>(std::clamp(std::lround(q * (trials - 1)), 0L, long(trials - 1)));
        return values[i];
    };
    out.ci_low = pick(0.16);
    out.ci_high = pick(0.84);
    return out;
}

std::string table_to_json(const StringTable& table) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    static const char* names[2] = {"e", "o"};
    for (int k = 0; k < StringTable::kEntries; ++k) {
        if (!StringTable::required(k)) continue;
        int dr, dc, l1, l2;
        StringTable::unkey(k, dr, dc, l1, l2);
        nlohmann::ordered_json e;
        e["offset"] = {dr, dc};
        e["sublattices"] = std::string(names[l1]) + names[l2];
        e["mean"] = table.mean(k);
        e["count"] = table.count(k);
        j.push_back(std::move(e));
    }
    return j.dump(2);
}

std::string chern_to_json(const ChernResult& result) {
    nlohmann::ordered_json j;
    j["chern"] = result.chern;
    j["grid"] = result.n;
    j["min_gap"] = result.min_gap;
    j["curvature"] = result.curvature;
    return j.dump(2);
}

std::string curvature_to_csv(const ChernResult& result) {
    std::string out;
    for (int a = 0; a < result.n; ++a) {
        for (int b = 0; b < result.n; ++b) {
            if (b) out += ',';
            out += format_number(result.curvature[static_cast<std::size_t>(a * result.n + b)]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace kfs
