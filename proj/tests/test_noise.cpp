#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "kfs/errors.hpp"
#include "kfs/gaussian.hpp"
#include "kfs/noise.hpp"
#include "kfs/trajectories.hpp"

using namespace kfs;

TEST(Noise, ZeroProbabilityLeavesFrameAlone) {
    const Lattice L = default_lattice();
    EvolutionFrame f{PauliString{}, std::vector<char>(static_cast<std::size_t>(L.num_sites()), 0)};
    std::vector<int> all(static_cast<std::size_t>(L.num_sites()));
    for (int s = 0; s < L.num_sites(); ++s) all[static_cast<std::size_t>(s)] = s;
    Rng rng(3);
    EXPECT_EQ(apply_layer_noise(f, all, 0.0, 0.5, {1, 1, 1}, rng), 0);
    EXPECT_EQ(f.frame.weight(), 0);
    for (char c : f.lost) EXPECT_EQ(c, 0);
}

TEST(Noise, ValidateRejectsBadProbabilities) {
    NoiseModel m;
    m.p_layer = 1.5;
    EXPECT_THROW(m.validate(), SchemaError);
    m = NoiseModel{};
    m.pauli_bias = {0, 0, 0};
    EXPECT_THROW(m.validate(), SchemaError);
    EXPECT_NO_THROW(NoiseModel{}.validate());
}

TEST(Noise, SampledFaultRatesMatchModel) {
    Rng rng(5);
    const int n = 200000;
    int loss = 0, pauli = 0, z = 0;
    for (int i = 0; i < n; ++i) {
        const Fault f = sample_fault(0.1, 0.4, {1, 1, 2}, rng);
        if (f.kind == FaultKind::Loss) ++loss;
        if (f.kind == FaultKind::Pauli) {
            ++pauli;
            if (f.pauli == Pauli::Z) ++z;
        }
    }
    EXPECT_NEAR(loss / double(n), 0.04, 0.003);
    EXPECT_NEAR(pauli / double(n), 0.06, 0.003);
    EXPECT_NEAR(z / double(pauli), 0.5, 0.02);
}

// A frame Pauli that anticommutes with a link must reverse that link's gate.
TEST(Noise, FramePauliFlipsLaterAnticommutingLinks) {
    const Lattice L = single_plaquette();
    const Encoding enc(L);
    const Layer layer = link_layer(L, LinkType::XX, 0.37);
    ASSERT_FALSE(layer.links.empty());
    const int l0 = layer.links.front();
    const int site = L.links()[static_cast<std::size_t>(l0)].a;

    EvolutionFrame f{PauliString::single(site, Pauli::Z), {}};
    CorrelationMatrix g1 = vacuum_state(enc);
    apply_layer(g1, enc, link_layer(L, LinkType::YY, 0.21));
    CorrelationMatrix g2 = g1;
    apply_layer(g1, enc, layer, &f);

    for (int l : layer.links) {
        const double th = (l == l0) ? -layer.theta : layer.theta;
        apply_layer(g2, enc, Layer{{l}, th});
    }
    EXPECT_LT((g1 - g2).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Noise, LostSitesDropTheirGates) {
    const Lattice L = single_plaquette();
    const Encoding enc(L);
    const Layer layer = link_layer(L, LinkType::XX, 0.5);
    const int l0 = layer.links.front();
    EvolutionFrame f{PauliString{}, std::vector<char>(static_cast<std::size_t>(L.num_sites()), 0)};
    f.lost[static_cast<std::size_t>(L.links()[static_cast<std::size_t>(l0)].b)] = 1;

    CorrelationMatrix g1 = vacuum_state(enc);
    CorrelationMatrix g2 = g1;
    apply_layer(g1, enc, layer, &f);
    for (int l : layer.links)
        if (l != l0) apply_layer(g2, enc, Layer{{l}, layer.theta});
    EXPECT_LT((g1 - g2).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Noise, AcceptLossDefinition) {
    const Lattice L = default_lattice();
    const int l = 0;
    const Link& link = L.links()[l];
    const std::vector<int> support{link.a, link.b};
    std::vector<char> lost(static_cast<std::size_t>(L.num_sites()), 0);
    for (int r : {0, 1, 5}) EXPECT_TRUE(accept_loss(L, lost, support, r));
    EXPECT_TRUE(accept_loss(L, lost, support, std::nullopt));

    // A neighbour of the support that is not in it.
    int neighbour = -1;
    for (LinkType t : {LinkType::XX, LinkType::YY, LinkType::ZZ}) {
        const int k = L.link_at(link.a, t);
        if (k < 0 || k == l) continue;
        const Link& o = L.links()[static_cast<std::size_t>(k)];
        neighbour = o.a == link.a ? o.b : o.a;
        break;
    }
    ASSERT_GE(neighbour, 0);
    lost[static_cast<std::size_t>(neighbour)] = 1;
    EXPECT_TRUE(accept_loss(L, lost, support, 0));
    EXPECT_FALSE(accept_loss(L, lost, support, 1));
    EXPECT_TRUE(accept_loss(L, lost, support, std::nullopt));
}

TEST(Noise, AcceptDecodingThreshold) {
    EXPECT_TRUE(accept_decoding(0, 0));
    EXPECT_FALSE(accept_decoding(1, 0));
    EXPECT_TRUE(accept_decoding(1, 1));
    EXPECT_TRUE(accept_decoding(8, std::nullopt));
}

// Initialization noise alone on the vacuum: a ZZ dimer survives unless one
// of its two sites took an X or Y, so <ZZ> = (1 - 2q)^2 among kept shots.
TEST(Noise, InitNoiseOnVacuumMatchesClosedForm) {
    const Lattice L = default_lattice();
    const Encoding enc(L);
    const CorrelationMatrix vac = vacuum_state(enc);
    const NoiseModel m;
    int zz = -1;
    for (std::size_t k = 0; k < L.links().size(); ++k)
        if (L.links()[k].type == LinkType::ZZ) {
            zz = static_cast<int>(k);
            break;
        }
    const PauliString op = link_operator(L, zz);
    const std::vector<int> support{L.links()[static_cast<std::size_t>(zz)].a, L.links()[static_cast<std::size_t>(zz)].b};
    std::vector<int> all(static_cast<std::size_t>(L.num_sites()));
    for (int s = 0; s < L.num_sites(); ++s) all[static_cast<std::size_t>(s)] = s;

    TrajectoryOptions opt;
    opt.n = 40000;
    opt.seed = 17;
    auto fn = [&](long long, Rng& rng) {
        EvolutionFrame f{PauliString{}, std::vector<char>(static_cast<std::size_t>(L.num_sites()), 0)};
        apply_layer_noise(f, all, m.p_ini, m.loss_fraction_ini, m.pauli_bias, rng);
        SnapshotRecord rec;
        rec.values = {*expect_pauli(vac, enc, op, &f)};
        rec.accepted = {static_cast<char>(accept_loss(L, f.lost, support, 0))};
        return rec;
    };
    const auto set = run_trajectories({"zz"}, fn, opt);
    const double q = m.p_ini * (1 - m.loss_fraction_ini) * (2.0 / 3.0) / (1 - m.p_ini * m.loss_fraction_ini);
    const double expected = (1 - 2 * q) * (1 - 2 * q);
    const auto& s = set.summary[0];
    const double sem = (s.ci_high - s.ci_low) / 2;
    EXPECT_NEAR(s.mean, expected, 4 * sem + 1e-12);
    const double keep = (1 - m.p_ini * m.loss_fraction_ini) * (1 - m.p_ini * m.loss_fraction_ini);
    EXPECT_NEAR(s.acceptance_fraction(), keep, 0.005);
}

namespace {

SnapshotRecord coin(long long i, Rng& rng) {
    SnapshotRecord rec;
    rec.values = {rng.uniform(), double(rng.sign())};
    rec.accepted = {1, static_cast<char>(i % 3 != 0)};
    return rec;
}

std::string summary_csv(const TrajectorySet& set) {
    std::ostringstream os;
    write_summary_csv(os, set.summary);
    return os.str();
}

}  // namespace

TEST(Trajectories, ZeroCountIsSchemaError) {
    TrajectoryOptions opt;
    opt.n = 0;
    EXPECT_THROW(run_trajectories({"a", "b"}, coin, opt), SchemaError);
}

TEST(Trajectories, SingleNoiselessTrajectory) {
    TrajectoryOptions opt;
    opt.n = 1;
    opt.keep_snapshots = true;
    auto fn = [](long long, Rng&) {
        SnapshotRecord r;
        r.values = {1.0};
        return r;
    };
    const auto set = run_trajectories({"w"}, fn, opt);
    ASSERT_EQ(set.snapshots.size(), 1u);
    EXPECT_EQ(set.summary[0].mean, 1.0);
    EXPECT_EQ(set.summary[0].ci_low, 1.0);
    EXPECT_EQ(set.summary[0].acceptance_fraction(), 1.0);
}

TEST(Trajectories, WorkerCountDoesNotChangeOutput) {
    for (IntervalMethod method : {IntervalMethod::Normal, IntervalMethod::Bootstrap}) {
        TrajectoryOptions opt;
        opt.n = 3001;
        opt.seed = 99;
        opt.keep_snapshots = true;
        opt.interval = method;
        opt.workers = 1;
        const auto a = run_trajectories({"u", "s"}, coin, opt);
        opt.workers = 8;
        const auto b = run_trajectories({"u", "s"}, coin, opt);
        EXPECT_EQ(summary_csv(a), summary_csv(b));
        std::ostringstream na, nb;
        write_ndjson(na, a);
        write_ndjson(nb, b);
        EXPECT_EQ(na.str(), nb.str());
    }
}

TEST(Trajectories, AcceptanceFractionCountsRejections) {
    TrajectoryOptions opt;
    opt.n = 300;
    const auto set = run_trajectories({"u", "s"}, coin, opt);
    EXPECT_EQ(set.summary[0].accepted, 300);
    EXPECT_EQ(set.summary[1].accepted, 200);
    EXPECT_NEAR(set.summary[1].acceptance_fraction(), 2.0 / 3.0, 1e-15);
}

TEST(Trajectories, BootstrapMatchesNormalForLargeSamples) {
    TrajectoryOptions opt;
    opt.n = 20000;
    opt.seed = 4;
    const auto normal = run_trajectories({"u", "s"}, coin, opt);
    opt.interval = IntervalMethod::Bootstrap;
    opt.bootstrap_resamples = 1000;
    const auto boot = run_trajectories({"u", "s"}, coin, opt);
    for (int k = 0; k < 2; ++k) {
        const double wn = normal.summary[k].ci_high - normal.summary[k].ci_low;
        const double wb = boot.summary[k].ci_high - boot.summary[k].ci_low;
        EXPECT_NEAR(wb / wn, 1.0, 0.1) << k;
        EXPECT_EQ(normal.summary[k].mean, boot.summary[k].mean);
    }
}

TEST(Trajectories, WilsonInterval) {
    const auto [lo, hi] = wilson_interval(50, 100, 1.96);
    EXPECT_NEAR(lo, 0.4038, 1e-3);
    EXPECT_NEAR(hi, 0.5962, 1e-3);
    const auto [l0, h0] = wilson_interval(0, 10, 1.0);
    EXPECT_EQ(l0, 0.0);
    EXPECT_GT(h0, 0.0);
    EXPECT_NEAR(normal_quantile_two_sided(0.95), 1.959964, 1e-5);
}

TEST(Trajectories, CsvFormatIsStable) {
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333");
    std::ostringstream os;
    ObservableSummary row;
    row.name = "w";
    row.mean = 0.25;
    row.ci_low = 0.2;
    row.ci_high = 0.3;
    row.accepted = 1;
    row.total = 4;
    write_summary_csv(os, {row});
    EXPECT_EQ(os.str(), "observable,mean,ci_low,ci_high,acceptance_fraction\nw,0.25,0.2,0.3,0.25\n");
}
