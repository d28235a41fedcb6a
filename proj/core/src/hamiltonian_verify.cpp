#include "fluxnet/hamiltonian_verify.hpp"

#include "fluxnet/errors.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fluxnet::verify {

namespace {

std::int64_t checked_power(std::int64_t base, int exponent, std::int64_t cap) {
    std::int64_t out = 1;
    for (int i = 0; i < exponent; ++i) {
        if (out > cap / base) return cap + 1;
        out *= base;
    }
    return out;
}

int sector_spin(std::uint32_t sector, int i) { return ((sector >> i) & 1U) ? -1 : 1; }

// Photon numbers of a Fock index, mode 0 slowest.
void decode(std::int64_t index, int modes, int n_fock, std::vector<int>& n) {
    for (int l = modes - 1; l >= 0; --l) {
        n[static_cast<std::size_t>(l)] = static_cast<int>(index % n_fock);
        index /= n_fock;
    }
}

std::vector<std::int64_t> strides(int modes, int n_fock) {
    std::vector<std::int64_t> s(static_cast<std::size_t>(modes), 1);
    for (int l = modes - 2; l >= 0; --l) s[static_cast<std::size_t>(l)] = s[static_cast<std::size_t>(l + 1)] * n_fock;
    return s;
}

struct Emitter {
    std::vector<Eigen::Triplet<double>> triplets;
    void add(std::int64_t row, std::int64_t col, double v) {
        if (v != 0.0) triplets.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col), v);
    }
};

// Fock-space terms shared by the full and sector builders: oscillators,
// longitudinal coupling with fixed spins, and resonator couplers.
void emit_fock_terms(const FullSystemConfig& cfg, std::uint32_t sector, std::int64_t offset, Emitter& out,
                     bool include_qubit_energy) {
    const int modes = cfg.size();
    const int f = cfg.n_fock;
    const std::int64_t fock_dim = cfg.fock_dimension();
    const auto stride = strides(modes, f);
    const auto& net = cfg.network;
    std::vector<int> n(static_cast<std::size_t>(modes));
    double spin_energy = 0.0;
    if (include_qubit_energy) {
        for (int i = 0; i < modes; ++i) spin_energy += cfg.epsilon(i) * sector_spin(sector, i);
    }
    for (std::int64_t col = 0; col < fock_dim; ++col) {
        decode(col, modes, f, n);
        double diag = spin_energy;
        for (int l = 0; l < modes; ++l) diag += net.omega_r(l) * (n[static_cast<std::size_t>(l)] + 0.5);
        out.add(offset + col, offset + col, diag);
        for (int l = 0; l < modes; ++l) {
            const int nl = n[static_cast<std::size_t>(l)];
            const double g = net.g_z(l) * sector_spin(sector, l);
            if (nl + 1 < f) out.add(offset + col + stride[static_cast<std::size_t>(l)], offset + col, g * std::sqrt(nl + 1.0));
            if (nl > 0) out.add(offset + col - stride[static_cast<std::size_t>(l)], offset + col, g * std::sqrt(static_cast<double>(nl)));
        }
        for (int i = 0; i < modes; ++i) {
            for (int j = i + 1; j < modes; ++j) {
                const double gc = net.g_c(i, j);
                if (gc == 0.0) continue;
                const int ni = n[static_cast<std::size_t>(i)];
                const int nj = n[static_cast<std::size_t>(j)];
                for (int di : {-1, 1}) {
                    const int mi = ni + di;
                    if (mi < 0 || mi >= f) continue;
                    const double ai = std::sqrt(static_cast<double>(std::max(ni, mi)));
                    for (int dj : {-1, 1}) {
                        const int mj = nj + dj;
                        if (mj < 0 || mj >= f) continue;
                        const double aj = std::sqrt(static_cast<double>(std::max(nj, mj)));
                        const std::int64_t row = col + di * stride[static_cast<std::size_t>(i)] +
                                                 dj * stride[static_cast<std::size_t>(j)];
                        out.add(offset + row, offset + col, gc * ai * aj);
                    }
                }
            }
        }
    }
}

Eigen::MatrixXd annihilation(int f) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(f, f);
    for (int n = 1; n < f; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

// I x ... x op (at mode l) x ... x I on k^modes states.
Eigen::MatrixXd embed(const Eigen::MatrixXd& op, int l, int modes) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(1, 1);
    for (int m = 0; m < modes; ++m) {
        const Eigen::MatrixXd factor = (m == l) ? op : Eigen::MatrixXd::Identity(op.rows(), op.cols());
        Eigen::MatrixXd next(out.rows() * factor.rows(), out.cols() * factor.cols());
        for (Eigen::Index r = 0; r < out.rows(); ++r) {
            for (Eigen::Index c = 0; c < out.cols(); ++c) {
                next.block(r * factor.rows(), c * factor.cols(), factor.rows(), factor.cols()) = out(r, c) * factor;
            }
        }
        out = std::move(next);
    }
    return out;
}

void require_frozen(const FullSystemConfig& cfg, const char* who) {
    if (!cfg.frozen()) {
        throw std::invalid_argument(std::string(who) + ": requires Delta = 0 and g_x = 0 for every qubit");
    }
}

}  // namespace

std::int64_t FullSystemConfig::fock_dimension() const {
    return checked_power(n_fock, size(), dimension_budget * 4 + 4);
}

std::int64_t FullSystemConfig::dimension() const {
    const std::int64_t fock = fock_dimension();
    const std::int64_t sectors = std::int64_t{1} << size();
    if (fock > (dimension_budget * 4 + 4) / sectors) return dimension_budget * 4 + 4;
    return fock * sectors;
}

bool FullSystemConfig::frozen() const {
    return (delta.size() == 0 || delta.isZero(0.0)) && (g_x.size() == 0 || g_x.isZero(0.0));
}

void FullSystemConfig::validate() const {
    network.validate();
    const Eigen::Index n = network.size();
    if (n > 20) throw std::invalid_argument("FullSystemConfig: at most 20 qubits");
    if (epsilon.size() != n || delta.size() != n || g_x.size() != n) {
        throw std::invalid_argument("FullSystemConfig: epsilon, delta and g_x must each have length N");
    }
    if (n_fock < 2) throw std::invalid_argument("FullSystemConfig: n_fock must be >= 2");
    if (!epsilon.allFinite() || !delta.allFinite() || !g_x.allFinite()) {
        throw std::invalid_argument("FullSystemConfig: qubit parameters must be finite");
    }
}

FullSystemConfig FullSystemConfig::frozen_config(const network::NetworkConfig& network,
                                                 const Eigen::VectorXd& epsilon, int n_fock) {
    FullSystemConfig cfg;
    cfg.network = network;
    cfg.epsilon = epsilon;
    cfg.delta = Eigen::VectorXd::Zero(network.size());
    cfg.g_x = Eigen::VectorXd::Zero(network.size());
    cfg.n_fock = n_fock;
    return cfg;
}

FullSystemConfig FullSystemConfig::with_fock(int n_fock_new) const {
    FullSystemConfig cfg = *this;
    cfg.n_fock = n_fock_new;
    return cfg;
}

SparseReal build_full_hamiltonian(const FullSystemConfig& config) {
    config.validate();
    const std::int64_t dim = config.dimension();
    if (dim > config.dimension_budget) {
        std::ostringstream msg;
        msg << "build_full_hamiltonian: dimension 2^" << config.size() << " x " << config.n_fock << "^"
            << config.size() << " exceeds the budget " << config.dimension_budget;
        throw BudgetError(msg.str());
    }
    const int modes = config.size();
    const std::int64_t fock_dim = config.fock_dimension();
    const auto stride = strides(modes, config.n_fock);
    Emitter em;
    std::vector<int> n(static_cast<std::size_t>(modes));
    for (std::uint32_t s = 0; s < (1U << modes); ++s) {
        const std::int64_t base = static_cast<std::int64_t>(s) * fock_dim;
        emit_fock_terms(config, s, base, em, true);
        for (int i = 0; i < modes; ++i) {
            const std::int64_t flipped = static_cast<std::int64_t>(s ^ (1U << i)) * fock_dim;
            const double d = config.delta(i);
            const double gx = config.g_x(i);
            for (std::int64_t col = 0; col < fock_dim; ++col) {
                em.add(flipped + col, base + col, d);
                if (gx == 0.0) continue;
                decode(col, modes, config.n_fock, n);
                const int ni = n[static_cast<std::size_t>(i)];
                const std::int64_t st = stride[static_cast<std::size_t>(i)];
                if (ni + 1 < config.n_fock) em.add(flipped + col + st, base + col, gx * std::sqrt(ni + 1.0));
                if (ni > 0) em.add(flipped + col - st, base + col, gx * std::sqrt(static_cast<double>(ni)));
            }
        }
    }
    SparseReal h(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    h.setFromTriplets(em.triplets.begin(), em.triplets.end());
    return h;
}

SparseReal build_sector_hamiltonian(const FullSystemConfig& config, std::uint32_t sector) {
    config.validate();
    require_frozen(config, "build_sector_hamiltonian");
    if (sector >= (1U << config.size())) throw std::invalid_argument("build_sector_hamiltonian: sector out of range");
    const std::int64_t dim = config.fock_dimension();
    if (dim > config.dimension_budget) {
        std::ostringstream msg;
        msg << "build_sector_hamiltonian: sector dimension " << config.n_fock << "^" << config.size()
            << " exceeds the budget " << config.dimension_budget;
        throw BudgetError(msg.str());
    }
    Emitter em;
    emit_fock_terms(config, sector, 0, em, true);
    SparseReal h(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    h.setFromTriplets(em.triplets.begin(), em.triplets.end());
    return h;
}

DisplacementUnitary build_displacement_unitary(const Eigen::MatrixXd& theta, const FullSystemConfig& config) {
    config.validate();
    const int modes = config.size();
    if (theta.rows() != modes || theta.cols() != modes) {
        throw std::invalid_argument("build_displacement_unitary: theta must be N x N");
    }
    const std::int64_t dim = config.dimension();
    if (dim > config.dimension_budget || dim * dim > config.dense_entry_budget) {
        std::ostringstream msg;
        msg << "build_displacement_unitary: dense dimension " << dim << " exceeds the dense budget of "
            << config.dense_entry_budget << " entries";
        throw BudgetError(msg.str());
    }
    const std::int64_t fock_dim = config.fock_dimension();
    const Eigen::MatrixXd a = annihilation(config.n_fock);
    const Eigen::MatrixXd ad_minus_a = a.transpose() - a;
    Eigen::MatrixXd generator = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<Eigen::MatrixXd> mode_ops;
    for (int l = 0; l < modes; ++l) mode_ops.push_back(embed(ad_minus_a, l, modes));
    for (std::uint32_t s = 0; s < (1U << modes); ++s) {
        const Eigen::VectorXd beta = sector_displacement(theta, s);
        auto block = generator.block(static_cast<Eigen::Index>(s) * fock_dim, static_cast<Eigen::Index>(s) * fock_dim,
                                     fock_dim, fock_dim);
        for (int l = 0; l < modes; ++l) block += beta(l) * mode_ops[static_cast<std::size_t>(l)];
    }
    DisplacementUnitary out;
    out.u = generator.exp();
    out.unitarity_deficit =
        (out.u.transpose() * out.u - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (out.unitarity_deficit > 1e-8) {
        std::ostringstream msg;
        msg << "build_displacement_unitary: unitarity deficit " << out.unitarity_deficit << " at n_fock "
            << config.n_fock;
        throw ConvergenceError(msg.str());
    }
    return out;
}

Eigen::VectorXd sector_displacement(const Eigen::MatrixXd& theta, std::uint32_t sector) {
    const Eigen::Index n = theta.rows();
    Eigen::VectorXd s(n);
    for (Eigen::Index k = 0; k < n; ++k) s(k) = sector_spin(sector, static_cast<int>(k));
    return -(theta.transpose() * s);
}

double self_energy_offset(const network::NetworkConfig& network) {
    const Eigen::MatrixXd g = network::build_G(network);
    const Eigen::MatrixXd inv = g.partialPivLu().solve(Eigen::MatrixXd::Identity(g.rows(), g.cols()));
    double out = 0.0;
    for (Eigen::Index k = 0; k < g.rows(); ++k) out -= network.g_z(k) * network.g_z(k) * inv(k, k);
    return out;
}

namespace {

double sector_constant(const FullSystemConfig& cfg, const Eigen::MatrixXd& j, double offset, std::uint32_t s) {
    const int modes = cfg.size();
    double c = offset;
    for (int i = 0; i < modes; ++i) {
        c += cfg.epsilon(i) * sector_spin(s, i);
        for (int k = i + 1; k < modes; ++k) c += j(i, k) * sector_spin(s, i) * sector_spin(s, k);
    }
    return c;
}

}  // namespace

Eigen::VectorXd predicted_sector_levels(const FullSystemConfig& config, std::uint32_t sector, int count,
                                        double convention_factor) {
    config.validate();
    if (count < 1) throw std::invalid_argument("predicted_sector_levels: count must be >= 1");
    const int modes = config.size();
    const Eigen::MatrixXd g = network::build_G(config.network);
    const Eigen::VectorXd root = config.network.omega_r.cwiseSqrt();
    const Eigen::MatrixXd dyn = root.asDiagonal() * g * root.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dyn, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
        throw PhysicsGateError("predicted_sector_levels: coupled resonators are unstable (G not positive definite)");
    }
    const Eigen::VectorXd nu = eig.eigenvalues().cwiseSqrt();
    const Eigen::MatrixXd j = network::effective_J(config.network, convention_factor).j;
    const double base = sector_constant(config, j, self_energy_offset(config.network), sector) + 0.5 * nu.sum();

    // Enumerate occupations with at most `count` quanta per mode.
    std::vector<double> levels;
    std::vector<int> occ(static_cast<std::size_t>(modes), 0);
    while (true) {
        double e = base;
        for (int k = 0; k < modes; ++k) e += occ[static_cast<std::size_t>(k)] * nu(k);
        levels.push_back(e);
        int k = 0;
        while (k < modes && ++occ[static_cast<std::size_t>(k)] > count) occ[static_cast<std::size_t>(k++)] = 0;
        if (k == modes) break;
    }
    std::sort(levels.begin(), levels.end());
    levels.resize(static_cast<std::size_t>(count));
    return Eigen::Map<Eigen::VectorXd>(levels.data(), count);
}

double transformed_residual(const FullSystemConfig& config, int n_fock, int n_keep, double convention_factor,
                            double* h_norm) {
    config.validate();
    require_frozen(config, "transformed_residual");
    const int modes = config.size();
    if (n_keep < 1 || n_keep > n_fock) throw std::invalid_argument("transformed_residual: need 1 <= n_keep <= n_fock");
    const std::int64_t block_dim = checked_power(n_keep, modes, config.dense_entry_budget);
    if (block_dim * block_dim > config.dense_entry_budget) {
        throw BudgetError("transformed_residual: kept block exceeds the dense budget");
    }
    const auto& net = config.network;
    const network::ThetaMatrix theta = network::solve_theta(net);
    const Eigen::MatrixXd j = network::effective_J(net, convention_factor).j;
    const double offset = self_energy_offset(net);

    const Eigen::MatrixXd a = annihilation(n_fock);
    const Eigen::MatrixXd x = a + a.transpose();
    const Eigen::MatrixXd num = a.transpose() * a;
    const Eigen::MatrixXd gen = a.transpose() - a;
    const Eigen::MatrixXd x_low = x.topLeftCorner(n_keep, n_keep);
    const Eigen::MatrixXd n_low = num.topLeftCorner(n_keep, n_keep);
    const auto d = static_cast<Eigen::Index>(block_dim);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);

    std::vector<Eigen::MatrixXd> x_bare, n_bare;
    for (int l = 0; l < modes; ++l) {
        x_bare.push_back(embed(x_low, l, modes));
        n_bare.push_back(embed(n_low, l, modes));
    }

    double worst = 0.0;
    double norm = 0.0;
    for (std::uint32_t s = 0; s < (1U << modes); ++s) {
        const Eigen::VectorXd beta = sector_displacement(theta.theta, s);
        std::vector<Eigen::MatrixXd> x_t, n_t;
        for (int l = 0; l < modes; ++l) {
            const Eigen::MatrixXd disp = (beta(l) * gen).exp();
            x_t.push_back(embed((disp.transpose() * x * disp).topLeftCorner(n_keep, n_keep), l, modes));
            n_t.push_back(embed((disp.transpose() * num * disp).topLeftCorner(n_keep, n_keep), l, modes));
        }
        double spin = 0.0;
        for (int i = 0; i < modes; ++i) spin += config.epsilon(i) * sector_spin(s, i);

        Eigen::MatrixXd transformed = spin * id;
        Eigen::MatrixXd bare = spin * id;
        Eigen::MatrixXd predicted = sector_constant(config, j, offset, s) * id;
        for (int l = 0; l < modes; ++l) {
            const double gs = net.g_z(l) * sector_spin(s, l);
            const auto ul = static_cast<std::size_t>(l);
            transformed += net.omega_r(l) * (n_t[ul] + 0.5 * id) + gs * x_t[ul];
            bare += net.omega_r(l) * (n_bare[ul] + 0.5 * id) + gs * x_bare[ul];
            predicted += net.omega_r(l) * (n_bare[ul] + 0.5 * id);
            for (int k = l + 1; k < modes; ++k) {
                const double gc = net.g_c(l, k);
                if (gc == 0.0) continue;
                const auto uk = static_cast<std::size_t>(k);
                transformed += gc * x_t[ul] * x_t[uk];
                bare += gc * x_bare[ul] * x_bare[uk];
                predicted += gc * x_bare[ul] * x_bare[uk];
            }
        }
        worst = std::max(worst, (transformed - predicted).cwiseAbs().maxCoeff());
        norm = std::max(norm, bare.cwiseAbs().maxCoeff());
    }
    if (h_norm != nullptr) *h_norm = norm;
    return norm > 0.0 ? worst / norm : worst;
}

VerifyReport verify_transformed_hamiltonian(const FullSystemConfig& config, const VerifyOptions& options) {
    config.validate();
    require_frozen(config, "verify_transformed_hamiltonian");
    if (options.n_keep < 1) throw std::invalid_argument("verify_transformed_hamiltonian: n_keep must be >= 1");
    const network::ThetaMatrix theta = network::solve_theta(config.network);
    double beta_max = 0.0;
    for (std::uint32_t s = 0; s < (1U << config.size()); ++s) {
        beta_max = std::max(beta_max, sector_displacement(theta.theta, s).cwiseAbs().maxCoeff());
    }
    int f = options.initial_fock;
    if (f <= 0) f = options.n_keep + static_cast<int>(std::ceil(4.0 * beta_max * beta_max)) + 8;
    f = std::max(f, options.n_keep + 1);

    VerifyReport report;
    report.j = network::effective_J(config.network, options.convention_factor).j;
    report.offset = self_energy_offset(config.network);
    for (int doubling = 0;; ++doubling, f *= 2) {
        if (f > options.max_fock) break;
        double norm = 0.0;
        const double r = transformed_residual(config, f, options.n_keep, options.convention_factor, &norm);
        report.trend.push_back({f, r});
        report.residual = r;
        report.h_norm = norm;
        report.n_fock = f;
        if (doubling >= options.min_doublings && r < options.tolerance) {
            report.passed = true;
            return report;
        }
    }
    std::ostringstream msg;
    msg << "verify_transformed_hamiltonian: residual did not reach " << options.tolerance << " by n_fock "
        << options.max_fock << "; trend:";
    for (const auto& t : report.trend) msg << " (" << t.n_fock << ", " << t.residual << ")";
    throw ConvergenceError(msg.str());
}

namespace {

struct SectorLevels {
    double ground = 0.0;
    double gap = 0.0;
};

SectorLevels sector_levels(const FullSystemConfig& cfg, std::uint32_t s, const ZZOptions& options) {
    const SparseReal h = build_sector_hamiltonian(cfg, s);
    SectorLevels out;
    if (h.rows() <= options.dense_limit) {
        const linalg::EigenPairs<double> pairs = linalg::dense_lowest<double>(Eigen::MatrixXd(h), 2);
        out.ground = pairs.values(0);
        out.gap = pairs.values(1) - pairs.values(0);
    } else {
        linalg::MatVec<double> apply = [&h](const linalg::Vector<double>& v, linalg::Vector<double>& y) {
            y.noalias() = h * v;
        };
        const linalg::EigenPairs<double> pairs = linalg::lanczos_lowest<double>(h.rows(), 2, apply, options.lanczos);
        out.ground = pairs.values(0);
        out.gap = pairs.values(1) - pairs.values(0);
    }
    return out;
}

ZZFit fit_once(const FullSystemConfig& cfg, const ZZOptions& options) {
    const int modes = cfg.size();
    const std::uint32_t sectors = 1U << modes;
    ZZFit fit;
    fit.n_fock = cfg.n_fock;
    fit.sector_energies.resize(sectors);
    fit.min_sector_gap = std::numeric_limits<double>::infinity();
    for (std::uint32_t s = 0; s < sectors; ++s) {
        const SectorLevels lv = sector_levels(cfg, s, options);
        fit.sector_energies(s) = lv.ground;
        fit.min_sector_gap = std::min(fit.min_sector_gap, lv.gap);
    }
    if (!(fit.min_sector_gap > 1e-9)) {
        std::ostringstream msg;
        msg << "zz_splitting_oracle: sector ground state not isolated (gap " << fit.min_sector_gap << " GHz)";
        throw PhysicsGateError(msg.str());
    }
    // Walsh projection: the model functions are orthogonal over all sectors.
    const double w = 1.0 / sectors;
    fit.constant = w * fit.sector_energies.sum();
    fit.epsilon = Eigen::VectorXd::Zero(modes);
    fit.j = Eigen::MatrixXd::Zero(modes, modes);
    for (std::uint32_t s = 0; s < sectors; ++s) {
        const double e = fit.sector_energies(s);
        for (int i = 0; i < modes; ++i) {
            fit.epsilon(i) += w * e * sector_spin(s, i);
            for (int k = i + 1; k < modes; ++k) fit.j(i, k) += w * e * sector_spin(s, i) * sector_spin(s, k);
        }
    }
    for (int i = 0; i < modes; ++i) {
        for (int k = i + 1; k < modes; ++k) fit.j(k, i) = fit.j(i, k);
    }
    fit.fit_residual = 0.0;
    for (std::uint32_t s = 0; s < sectors; ++s) {
        double model = fit.constant;
        for (int i = 0; i < modes; ++i) {
            model += fit.epsilon(i) * sector_spin(s, i);
            for (int k = i + 1; k < modes; ++k) model += fit.j(i, k) * sector_spin(s, i) * sector_spin(s, k);
        }
        fit.fit_residual = std::max(fit.fit_residual, std::abs(fit.sector_energies(s) - model));
    }
    return fit;
}

}  // namespace

ZZFit zz_splitting_oracle(const FullSystemConfig& config, const ZZOptions& options) {
    config.validate();
    require_frozen(config, "zz_splitting_oracle");
    ZZFit fit = fit_once(config, options);
    if (!options.converge_fock) return fit;
    int f = config.n_fock;
    while (true) {
        const int next = std::max(f + 2, static_cast<int>(std::ceil(1.5 * f)));
        if (next > options.max_fock) break;
        ZZFit refined = fit_once(config.with_fock(next), options);
        const double change = std::max((refined.j - fit.j).cwiseAbs().maxCoeff(),
                                       (refined.epsilon - fit.epsilon).cwiseAbs().maxCoeff());
        fit = std::move(refined);
        f = next;
        if (change <= options.fock_tolerance) return fit;
    }
    std::ostringstream msg;
    msg << "zz_splitting_oracle: fitted couplings not converged by n_fock " << options.max_fock;
    throw ConvergenceError(msg.str());
}

}  // namespace fluxnet::verify
