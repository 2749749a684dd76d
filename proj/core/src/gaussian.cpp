#include "kfs/gaussian.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "kfs/errors.hpp"
#include "kfs/tableau.hpp"

namespace kfs {

namespace {

constexpr double kGapTol = 1e-10;
constexpr double kBranchTol = 1e-8;

// Splits a real Schur form of a normal matrix into 1x1 and 2x2 diagonal blocks.
std::vector<std::pair<int, int>> schur_blocks(const Eigen::MatrixXd& t) {
    std::vector<std::pair<int, int>> blocks;
    const int n = static_cast<int>(t.rows());
    for (int i = 0; i < n;) {
        if (i + 1 < n && t(i + 1, i) != 0.0) {
            blocks.emplace_back(i, 2);
            i += 2;
        } else {
            blocks.emplace_back(i, 1);
            i += 1;
        }
    }
    return blocks;
}

}  // namespace

Layer link_layer(const Lattice& lattice, LinkType type, double theta) {
    Layer layer;
    layer.theta = theta;
    for (std::size_t l = 0; l < lattice.links().size(); ++l)
        if (lattice.links()[l].type == type) layer.links.push_back(static_cast<int>(l));
    return layer;
}

FloquetCycle xyz_cycle(const Lattice& lattice, double theta_x, double theta_y, double theta_z) {
    return FloquetCycle{{link_layer(lattice, LinkType::XX, theta_x), link_layer(lattice, LinkType::YY, theta_y),
                         link_layer(lattice, LinkType::ZZ, theta_z)}};
}

std::vector<Layer> repeat_layers(const FloquetCycle& cycle, int depth) {
    std::vector<Layer> out;
    if (cycle.layers.empty()) return out;
    for (int d = 0; d < depth; ++d) out.push_back(cycle.layers[static_cast<std::size_t>(d) % cycle.layers.size()]);
    return out;
}

bool EvolutionFrame::any_lost(const PauliString& support) const {
    if (lost.empty()) return false;
    for (const auto& [q, letter] : support.terms())
        if (lost[static_cast<std::size_t>(q)]) return true;
    return false;
}

CorrelationMatrix vacuum_state(const Encoding& enc) {
    CliffordState state(enc.num_sites());
    for (const auto& st : enc.vacuum_stabilizers()) {
        const int before = state.peek(st.op);
        if (before != 0 && before != st.value) {
            if (st.mandatory) throw InvalidPattern("vacuum stabilizers conflict: " + st.op.to_string());
            continue;
        }
        state.measure_forced(st.op, st.value);
    }
    const int m = enc.num_majoranas();
    CorrelationMatrix g = CorrelationMatrix::Zero(m, m);
    for (int x = 0; x < m; ++x)
        for (int y = x + 1; y < m; ++y) {
            g(x, y) = state.peek(enc.bilinear(x, y));
            g(y, x) = -g(x, y);
        }
    return g;
}

CorrelationMatrix ground_state(const QuadraticHamiltonian& h, ZeroModePolicy policy) {
    const Eigen::RealSchur<Eigen::MatrixXd> schur(h.a);
    const Eigen::MatrixXd& t = schur.matrixT();
    const Eigen::MatrixXd& q = schur.matrixU();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(t.rows(), t.cols());
    for (const auto& [i, size] : schur_blocks(t)) {
        const double eps = size == 2 ? t(i, i + 1) : 0.0;
        if (std::abs(eps) < kGapTol) {
            if (policy == ZeroModePolicy::Throw) throw GaplessSpectrum("quadratic Hamiltonian has a zero mode");
            continue;
        }
        const double sgn = eps > 0 ? 1.0 : -1.0;
        p(i, i + 1) = sgn;
        p(i + 1, i) = -sgn;
    }
    CorrelationMatrix g = -(q * p * q.transpose());
    return 0.5 * (g - g.transpose());
}

double energy(const QuadraticHamiltonian& h, const CorrelationMatrix& gamma) {
    return 0.25 * h.a.cwiseProduct(gamma).sum();
}

QuadraticHamiltonian link_hamiltonian(const Encoding& enc, double jx, double jy, double jz) {
    const int m = enc.num_majoranas();
    QuadraticHamiltonian h{Eigen::MatrixXd::Zero(m, m)};
    const auto& links = enc.lattice().links();
    for (std::size_t l = 0; l < links.size(); ++l) {
        const double j = links[l].type == LinkType::XX ? jx : links[l].type == LinkType::YY ? jy : jz;
        const double v = -2.0 * j * enc.link_signs()[l];
        h.a(links[l].a, links[l].b) += v;
        h.a(links[l].b, links[l].a) -= v;
    }
    return h;
}

Eigen::MatrixXd plane_rotation(int dim, int x, int y, double alpha) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(dim, dim);
    const double c = std::cos(alpha), s = std::sin(alpha);
    r(x, x) = c;
    r(x, y) = -s;
    r(y, x) = s;
    r(y, y) = c;
    return r;
}

void rotate_plane(CorrelationMatrix& gamma, int x, int y, double alpha) {
    const double c = std::cos(alpha), s = std::sin(alpha);
    const Eigen::RowVectorXd rx = gamma.row(x), ry = gamma.row(y);
    gamma.row(x) = c * rx - s * ry;
    gamma.row(y) = s * rx + c * ry;
    const Eigen::VectorXd cx = gamma.col(x), cy = gamma.col(y);
    gamma.col(x) = c * cx - s * cy;
    gamma.col(y) = s * cx + c * cy;
}

namespace {

// exp(i phi s K) on link (a, b) rotates the (a, b) plane by 2 phi s.
double link_angle(double theta, int sign) { return 2.0 * (theta * M_PI / 4.0) * sign; }

}  // namespace

void apply_layer(CorrelationMatrix& gamma, const Encoding& enc, const Layer& layer, const EvolutionFrame* frame) {
    const Lattice& lat = enc.lattice();
    for (int l : layer.links) {
        const Link& link = lat.links()[static_cast<std::size_t>(l)];
        int sign = enc.link_signs()[static_cast<std::size_t>(l)];
        if (frame) {
            if (frame->is_lost(link.a) || frame->is_lost(link.b)) continue;
            sign *= frame->sign_for(link_operator(lat, l));
        }
        rotate_plane(gamma, link.a, link.b, link_angle(layer.theta, sign));
    }
}

Eigen::MatrixXd layer_orthogonal(const Encoding& enc, const Layer& layer) {
    const int m = enc.num_majoranas();
    Eigen::MatrixXd o = Eigen::MatrixXd::Identity(m, m);
    for (int l : layer.links) {
        const Link& link = enc.lattice().links()[static_cast<std::size_t>(l)];
        o = plane_rotation(m, link.a, link.b, link_angle(layer.theta, enc.link_signs()[static_cast<std::size_t>(l)])) * o;
    }
    return o;
}

Eigen::MatrixXd cycle_orthogonal(const Encoding& enc, const FloquetCycle& cycle, int n_repeats) {
    const int m = enc.num_majoranas();
    Eigen::MatrixXd one = Eigen::MatrixXd::Identity(m, m);
    for (const Layer& layer : cycle.layers) one = layer_orthogonal(enc, layer) * one;
    Eigen::MatrixXd o = Eigen::MatrixXd::Identity(m, m);
    for (int k = 0; k < n_repeats; ++k) o = one * o;
    return o;
}

void string_rotation(CorrelationMatrix& gamma, const Encoding& enc, const PauliString& p, double angle) {
    const auto d = enc.decompose(p);
    if (!d || d->majoranas.size() != 2) throw NotGaussian("string is not a single Majorana bilinear: " + p.to_string());
    rotate_plane(gamma, d->majoranas[0], d->majoranas[1], 2.0 * angle * d->sign);
}

double expect_majorana(const CorrelationMatrix& gamma, int x, int y, int frame_sign) {
    if (x == y) throw InvariantBreach("Majorana two-point function needs distinct indices");
    return frame_sign * gamma(x, y);
}

CorrelationMatrix submatrix(const CorrelationMatrix& gamma, const std::vector<int>& idx) {
    const auto k = static_cast<Eigen::Index>(idx.size());
    CorrelationMatrix s(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) s(i, j) = gamma(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    return s;
}

double pfaffian(Eigen::MatrixXd a) {
    // Parlett-Reid style skew elimination with partial pivoting.
    const Eigen::Index n = a.rows();
    if (n % 2) return 0.0;
    double pf = 1.0;
    for (Eigen::Index k = 0; k + 1 < n; k += 2) {
        Eigen::Index kp;
        a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&kp);
        kp += k + 1;
        if (kp != k + 1) {
            a.row(k + 1).swap(a.row(kp));
            a.col(k + 1).swap(a.col(kp));
            pf = -pf;
        }
        if (a(k + 1, k) == 0.0) return 0.0;
        pf *= a(k, k + 1);
        if (k + 2 < n) {
            const Eigen::VectorXd tau = a.row(k).tail(n - k - 2).transpose() / a(k, k + 1);
            const Eigen::VectorXd v = a.col(k + 1).tail(n - k - 2);
            a.bottomRightCorner(n - k - 2, n - k - 2) += tau * v.transpose() - v * tau.transpose();
        }
    }
    return pf;
}

std::optional<double> expect_pauli(const CorrelationMatrix& gamma, const Encoding& enc, const PauliString& p,
                                   const EvolutionFrame* frame) {
    const auto d = enc.decompose(p);
    if (!d) return std::nullopt;
    double v = d->sign * (d->majoranas.empty() ? 1.0 : pfaffian(submatrix(gamma, d->majoranas)));
    if (frame) v *= frame->sign_for(p);
    return v;
}

namespace {

// (majorana lo, majorana hi, sign) with Z Z on the dimer = sign * i c_lo c_hi.
struct DimerForm {
    int lo, hi, sign;
};

DimerForm dimer(const Encoding& enc, int pair) {
    const auto& [a, b] = enc.fermions().pairs.at(static_cast<std::size_t>(pair));
    const int l = enc.lattice().link_between(a, b);
    return {std::min(a, b), std::max(a, b), enc.link_signs()[static_cast<std::size_t>(l)]};
}

}  // namespace

double density(const CorrelationMatrix& gamma, const Encoding& enc, int pair) {
    const DimerForm d = dimer(enc, pair);
    const double n = 0.5 * (1.0 - d.sign * gamma(d.lo, d.hi));
    if (n < -1e-9 || n > 1.0 + 1e-9) throw InvariantBreach("density outside [0, 1]");
    return n;
}

double total_particle_number(const CorrelationMatrix& gamma, const Encoding& enc) {
    double total = 0.0;
    for (std::size_t k = 0; k < enc.fermions().pairs.size(); ++k) total += density(gamma, enc, static_cast<int>(k));
    return total;
}

double density_density(const CorrelationMatrix& gamma, const Encoding& enc, int pair_i, int pair_j) {
    if (pair_i == pair_j) throw InvariantBreach("density-density needs two distinct sites");
    const DimerForm u = dimer(enc, pair_i), w = dimer(enc, pair_j);
    const int a = u.lo, b = u.hi, c = w.lo, d = w.hi;
    return 0.25 * u.sign * w.sign * (gamma(a, d) * gamma(b, c) - gamma(a, c) * gamma(b, d));
}

Eigen::MatrixXd real_log_orthogonal(const Eigen::MatrixXd& o) {
    const Eigen::RealSchur<Eigen::MatrixXd> schur(o);
    const Eigen::MatrixXd& t = schur.matrixT();
    const Eigen::MatrixXd& q = schur.matrixU();
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(t.rows(), t.cols());
    for (const auto& [i, size] : schur_blocks(t)) {
        if (size == 1) {
            if (t(i, i) < 0) throw LogBranchAmbiguity("orthogonal has eigenvalue -1");
            continue;
        }
        const double ang = std::atan2(t(i + 1, i), t(i, i));
        if (M_PI - std::abs(ang) < kBranchTol) throw LogBranchAmbiguity("eigenphase at the branch cut");
        // Standardized Schur blocks of a rotation are [[c, -s'], [s, c]] with s s' > 0.
        const double s_geo = std::sqrt(std::abs(t(i + 1, i) * t(i, i + 1)));
        const double phi = std::atan2(t(i + 1, i) > 0 ? s_geo : -s_geo, t(i, i));
        l(i + 1, i) = phi;
        l(i, i + 1) = -phi;
    }
    Eigen::MatrixXd a = q * l * q.transpose();
    return 0.5 * (a - a.transpose());
}

QuadraticHamiltonian effective_hamiltonian(const Encoding& enc, const FloquetCycle& cycle, int n_repeats) {
    return {real_log_orthogonal(cycle_orthogonal(enc, cycle, n_repeats))};
}

std::vector<int> bulk_majoranas(const Encoding& enc) { return enc.lattice().bulk_region(); }

double particle_nonconservation(const Encoding& enc, const Eigen::MatrixXd& cycle_o) {
    const int m = enc.num_majoranas();
    Eigen::VectorXd parity = Eigen::VectorXd::Ones(m);
    Eigen::MatrixXd a_n = Eigen::MatrixXd::Zero(m, m);
    for (const auto& [a, b] : enc.fermions().pairs) {
        parity(a) = -1.0;
        parity(b) = -1.0;
        const int lo = std::min(a, b), hi = std::max(a, b);
        a_n(lo, hi) = -1.0;
        a_n(hi, lo) = 1.0;
    }
    const Eigen::MatrixXd shifted = parity.asDiagonal() * (cycle_o * cycle_o);
    const Eigen::MatrixXd a = 0.5 * real_log_orthogonal(shifted);
    const Eigen::MatrixXd comm = a * a_n - a_n * a;
    const auto bulk = bulk_majoranas(enc);
    const Eigen::MatrixXd sub = submatrix(comm, bulk);
    if (sub.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Eigen::MatrixXd>(sub).singularValues()(0);
}

}  // namespace kfs
