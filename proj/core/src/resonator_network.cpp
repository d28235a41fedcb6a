#include "fluxnet/resonator_network.hpp"

#include "fluxnet/errors.hpp"
#include "fluxnet/units.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fluxnet::network {

void NetworkConfig::validate() const {
    const Eigen::Index n = omega_r.size();
    if (n < 1) throw std::invalid_argument("NetworkConfig: need at least one resonator");
    if (g_z.size() != n) throw std::invalid_argument("NetworkConfig: g_z length must equal n");
    if (g_c.rows() != n || g_c.cols() != n) throw std::invalid_argument("NetworkConfig: g_c must be n x n");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(omega_r(i) > 0.0)) throw std::invalid_argument("NetworkConfig: omega_r must be > 0");
        if (!std::isfinite(g_z(i))) throw std::invalid_argument("NetworkConfig: g_z must be finite");
        if (g_c(i, i) != 0.0) throw std::invalid_argument("NetworkConfig: g_c diagonal must be zero");
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (!std::isfinite(g_c(i, j)) || g_c(i, j) != g_c(j, i)) {
                throw std::invalid_argument("NetworkConfig: g_c must be finite and symmetric");
            }
        }
    }
}

NetworkConfig NetworkConfig::uniform(int n, double omega, double g) {
    if (n < 1) throw std::invalid_argument("NetworkConfig::uniform: n must be >= 1");
    return {Eigen::VectorXd::Constant(n, omega), Eigen::VectorXd::Constant(n, g), Eigen::MatrixXd::Zero(n, n)};
}

Eigen::MatrixXd build_G(const NetworkConfig& config) {
    config.validate();
    Eigen::MatrixXd g = 2.0 * config.g_c;
    g.diagonal() = config.omega_r;
    return g;
}

double condition_number(const Eigen::MatrixXd& symmetric) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd mags = eig.eigenvalues().cwiseAbs();
    const double lo = mags.minCoeff();
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    return mags.maxCoeff() / lo;
}

double theta_residual(const NetworkConfig& config, const Eigen::MatrixXd& theta) {
    const Eigen::MatrixXd g = build_G(config);
    // Row i of theta times G must equal g_i e_i.
    Eigen::MatrixXd r = theta * g;
    r.diagonal() -= config.g_z;
    return r.cwiseAbs().maxCoeff();
}

namespace {

void check_conditioning(double condition) {
    if (!(condition <= kConditionLimit)) {
        std::ostringstream msg;
        msg << "coupling matrix G is singular or ill-conditioned (condition number " << condition
            << " > " << kConditionLimit << ")";
        throw PhysicsGateError(msg.str());
    }
}

}  // namespace

ThetaMatrix solve_theta(const NetworkConfig& config) {
    const Eigen::MatrixXd g = build_G(config);
    ThetaMatrix out;
    out.condition = condition_number(g);
    check_conditioning(out.condition);
    const Eigen::MatrixXd g_inv = g.partialPivLu().solve(Eigen::MatrixXd::Identity(g.rows(), g.cols()));
    out.theta = config.g_z.asDiagonal() * g_inv.transpose();
    out.residual = theta_residual(config, out.theta);
    return out;
}

Eigen::MatrixXd solve_theta_cramer(const NetworkConfig& config) {
    const Eigen::MatrixXd g = build_G(config);
    const Eigen::Index n = g.rows();
    if (n > 4) throw std::invalid_argument("solve_theta_cramer: only n <= 4");
    check_conditioning(condition_number(g));
    const double det = g.determinant();
    // Row i solves theta_i G = g_i e_i^T, i.e. G^T theta_i^T = g_i e_i.
    const Eigen::MatrixXd gt = g.transpose();
    Eigen::MatrixXd theta(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            Eigen::MatrixXd replaced = gt;
            replaced.col(k).setZero();
            replaced(i, k) = config.g_z(i);
            theta(i, k) = replaced.determinant() / det;
        }
    }
    return theta;
}

EffectiveCouplings effective_J(const NetworkConfig& config, double convention_factor) {
    const ThetaMatrix theta = solve_theta(config);
    const Eigen::Index n = theta.theta.rows();
    EffectiveCouplings out;
    out.convention_factor = convention_factor;
    out.condition = theta.condition;
    out.j = Eigen::MatrixXd::Zero(n, n);
    // -kappa g_i theta_ji = -kappa g_i g_j (G^-1)_ij; symmetrized so J_ij == J_ji bitwise.
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = -0.5 * convention_factor *
                             (config.g_z(i) * theta.theta(j, i) + config.g_z(j) * theta.theta(i, j));
            out.j(i, j) = v;
            out.j(j, i) = v;
        }
    }
    return out;
}

double j12_closed_form(double omega1, double omega2, double g1, double g2, double gc) {
    const double denom = omega1 * omega2 - 4.0 * gc * gc;
    if (std::abs(denom) <= 1e-12 * std::abs(omega1 * omega2)) {
        throw std::domain_error("j12_closed_form: resonant denominator omega1 omega2 = (2 gc)^2");
    }
    return 4.0 * g1 * g2 * gc / denom;
}

double scaling_estimate(const NetworkConfig& config, int i, int j) {
    config.validate();
    if (i < 0 || j < 0 || i >= config.size() || j >= config.size()) {
        throw std::invalid_argument("scaling_estimate: index out of range");
    }
    return (config.g_z(i) / config.omega_r(i)) * (config.g_z(j) / config.omega_r(j)) * config.g_c(i, j);
}

double j12_circuit(double m_ph, double l_r_nh, double m_c_ph, double iq1_na, double iq2_na) {
    if (!(l_r_nh > 0.0)) throw std::invalid_argument("j12_circuit: l_r must be > 0");
    const double ratio = (m_ph * units::kPico) / (l_r_nh * units::kNano);
    const double joules = ratio * ratio * (m_c_ph * units::kPico) * (iq1_na * units::kNano) * (iq2_na * units::kNano);
    return units::joules_to_ghz(joules);
}

std::vector<CouplerViolation> coupler_violations(const NetworkConfig& config, double limit) {
    std::vector<CouplerViolation> out;
    for (int i = 0; i < config.size(); ++i) {
        for (int j = i + 1; j < config.size(); ++j) {
            if (std::abs(config.g_c(i, j)) > limit) out.push_back({i, j, config.g_c(i, j)});
        }
    }
    return out;
}

namespace {

struct PairIndex {
    std::vector<std::pair<int, int>> pairs;
    explicit PairIndex(int n) {
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
        }
    }
};

// Residual J(g_c) - target over the upper triangle. False when G is not
// positive definite or is ill-conditioned.
bool evaluate(const NetworkConfig& cfg, const Eigen::MatrixXd& target, const PairIndex& idx, double kappa,
              Eigen::VectorXd& residual, Eigen::MatrixXd* g_inv) {
    const Eigen::MatrixXd g = build_G(cfg);
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) return false;
    if (!(condition_number(g) <= kConditionLimit)) return false;
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(g.rows(), g.cols()));
    residual.resize(static_cast<Eigen::Index>(idx.pairs.size()));
    for (std::size_t p = 0; p < idx.pairs.size(); ++p) {
        const auto [i, j] = idx.pairs[p];
        residual(static_cast<Eigen::Index>(p)) = -kappa * cfg.g_z(i) * cfg.g_z(j) * inv(i, j) - target(i, j);
    }
    if (g_inv != nullptr) *g_inv = inv;
    return true;
}

void set_couplers(NetworkConfig& cfg, const PairIndex& idx, const Eigen::VectorXd& x) {
    for (std::size_t p = 0; p < idx.pairs.size(); ++p) {
        const auto [i, j] = idx.pairs[p];
        cfg.g_c(i, j) = x(static_cast<Eigen::Index>(p));
        cfg.g_c(j, i) = x(static_cast<Eigen::Index>(p));
    }
}

std::string describe(const std::vector<CouplerViolation>& violations, double limit) {
    std::ostringstream msg;
    msg << "embedding needs couplers outside |g_c| <= " << limit << " GHz:";
    for (const auto& v : violations) msg << " (" << v.i << "," << v.j << ")=" << v.g_c;
    return msg.str();
}

}  // namespace

EmbedResult embed_problem(const IsingProblem& target, const NetworkConfig& hardware, double scale,
                          const EmbedOptions& options) {
    target.validate();
    hardware.validate();
    const int n = target.size();
    if (hardware.size() != n) throw std::invalid_argument("embed_problem: problem and hardware sizes differ");
    if (!(scale >= 0.0) || !std::isfinite(scale)) throw std::invalid_argument("embed_problem: scale must be >= 0");
    const double kappa = options.convention_factor;

    const Eigen::MatrixXd goal = scale * target.j_tilde;
    const PairIndex idx(n);
    const auto m = static_cast<Eigen::Index>(idx.pairs.size());

    EmbedResult result;
    result.config = hardware;
    result.config.g_c.setZero();
    if (m == 0) return result;

    Eigen::VectorXd x(m);
    for (Eigen::Index p = 0; p < m; ++p) {
        const auto [i, j] = idx.pairs[static_cast<std::size_t>(p)];
        const double gg = hardware.g_z(i) * hardware.g_z(j);
        x(p) = gg == 0.0 ? 0.0 : goal(i, j) * hardware.omega_r(i) * hardware.omega_r(j) / (2.0 * kappa * gg);
    }
    set_couplers(result.config, idx, x);

    Eigen::VectorXd r;
    Eigen::MatrixXd inv;
    if (!evaluate(result.config, goal, idx, kappa, r, &inv)) {
        // First-order guess is already unphysical; restart from zero couplers.
        x.setZero();
        set_couplers(result.config, idx, x);
        evaluate(result.config, goal, idx, kappa, r, &inv);
    }
    double norm = r.cwiseAbs().maxCoeff();

    int iter = 0;
    while (norm > options.tolerance && iter < options.max_iterations) {
        ++iter;
        // dJ_ij/dgc_ab = 2 kappa g_i g_j [inv_ia inv_bj + inv_ib inv_aj]
        Eigen::MatrixXd jac(m, m);
        for (Eigen::Index p = 0; p < m; ++p) {
            const auto [i, j] = idx.pairs[static_cast<std::size_t>(p)];
            for (Eigen::Index q = 0; q < m; ++q) {
                const auto [a, b] = idx.pairs[static_cast<std::size_t>(q)];
                jac(p, q) = 2.0 * kappa * hardware.g_z(i) * hardware.g_z(j) *
                            (inv(i, a) * inv(b, j) + inv(i, b) * inv(a, j));
            }
        }
        const Eigen::VectorXd step = jac.fullPivLu().solve(-r);
        double t = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
            NetworkConfig trial = result.config;
            const Eigen::VectorXd x_trial = x + t * step;
            set_couplers(trial, idx, x_trial);
            Eigen::VectorXd r_trial;
            Eigen::MatrixXd inv_trial;
            if (!evaluate(trial, goal, idx, kappa, r_trial, &inv_trial)) continue;
            const double trial_norm = r_trial.cwiseAbs().maxCoeff();
            if (trial_norm < norm || trial_norm <= options.tolerance) {
                x = x_trial;
                result.config = std::move(trial);
                r = std::move(r_trial);
                inv = std::move(inv_trial);
                norm = trial_norm;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    result.iterations = iter;
    result.residual = norm;

    const auto violations = coupler_violations(result.config, options.max_coupler);
    const bool scale_out = scale > options.max_scale;
    if (norm > options.tolerance) {
        if (!violations.empty() || scale_out) throw PhysicsGateError(describe(violations, options.max_coupler));
        std::ostringstream msg;
        msg << "embed_problem: Newton iteration stopped after " << iter << " steps with residual " << norm
            << " GHz (target " << options.tolerance << ")";
        throw ConvergenceError(msg.str());
    }
    if (!violations.empty()) throw PhysicsGateError(describe(violations, options.max_coupler));
    if (scale_out) {
        std::ostringstream msg;
        msg << "embed_problem: scale " << scale << " GHz beyond the declared range [0, " << options.max_scale << "]";
        throw PhysicsGateError(msg.str());
    }
    return result;
}

}  // namespace fluxnet::network
