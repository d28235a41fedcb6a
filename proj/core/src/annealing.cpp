#include "fluxnet/annealing.hpp"

#include "fluxnet/errors.hpp"
#include "fluxnet/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fluxnet::anneal {

double envelope_value(Envelope shape, double s) {
    s = std::clamp(s, 0.0, 1.0);
    switch (shape) {
        case Envelope::kLinear:
            return s;
        case Envelope::kQuadratic:
            return s * s;
        case Envelope::kSine: {
            const double v = std::sin(0.5 * units::kPi * s);
            return v * v;
        }
    }
    return s;
}

double Schedule::lambda(double t) const { return envelope_value(lambda_shape, t / t_f); }

double Schedule::gamma(double t) const { return 1.0 - envelope_value(gamma_shape, t / t_f); }

void Schedule::validate() const {
    if (!(t_f > 0.0) || !std::isfinite(t_f)) throw std::invalid_argument("Schedule: t_f must be > 0");
}

Schedule Schedule::linear(double t_f) {
    Schedule s;
    s.t_f = t_f;
    return s;
}

namespace {

void check_spin_inputs(const IsingProblem& problem, const Eigen::VectorXd& d_scale) {
    problem.validate();
    if (d_scale.size() != problem.size()) throw std::invalid_argument("d_scale must have one entry per spin");
    if (!(d_scale.minCoeff() >= 0.0)) throw std::invalid_argument("d_scale entries must be >= 0");
}

Eigen::VectorXd classical_diagonal(const IsingProblem& problem, double e_scale) {
    const std::uint64_t dim = std::uint64_t{1} << problem.size();
    Eigen::VectorXd diag(static_cast<Eigen::Index>(dim));
    for (std::uint64_t c = 0; c < dim; ++c) diag(static_cast<Eigen::Index>(c)) = e_scale * problem.energy(c);
    return diag;
}

}  // namespace

Eigen::MatrixXd build_qa_hamiltonian(const IsingProblem& problem, double lam, double gam, double e_scale,
                                     const Eigen::VectorXd& d_scale) {
    check_spin_inputs(problem, d_scale);
    if (!(lam >= 0.0 && lam <= 1.0 && gam >= 0.0 && gam <= 1.0)) {
        throw std::invalid_argument("build_qa_hamiltonian: lam and gam must lie in [0, 1]");
    }
    const int n = problem.size();
    if (n > kDenseSpinLimit) {
        std::ostringstream msg;
        msg << "build_qa_hamiltonian: " << n << " spins exceed the dense limit of " << kDenseSpinLimit;
        throw BudgetError(msg.str());
    }
    const Eigen::Index dim = Eigen::Index{1} << n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    h.diagonal() = lam * classical_diagonal(problem, e_scale);
    for (Eigen::Index c = 0; c < dim; ++c) {
        for (int i = 0; i < n; ++i) h(c ^ (Eigen::Index{1} << i), c) -= gam * d_scale(i);
    }
    return h;
}

GroundTruth brute_force_ground_state(const IsingProblem& problem) {
    problem.validate();
    const int n = problem.size();
    if (n > 20) throw std::invalid_argument("brute_force_ground_state: n must be <= 20");
    GroundTruth out;
    out.energy = std::numeric_limits<double>::infinity();
    const std::uint64_t dim = std::uint64_t{1} << n;
    // Energies are sums of at most n(n+1)/2 terms in [-1, 1]; ties within
    // rounding count as degenerate.
    const double slack = 1e-12 * (1.0 + n * n);
    for (std::uint64_t c = 0; c < dim; ++c) {
        const double e = problem.energy(c);
        if (e < out.energy - slack) {
            out.energy = e;
            out.configurations.assign(1, c);
        } else if (std::abs(e - out.energy) <= slack) {
            out.configurations.push_back(c);
            out.energy = std::min(out.energy, e);
        }
    }
    return out;
}

Eigen::VectorXcd plus_state(int n) {
    if (n < 1 || n > kEvolveSpinLimit) throw std::invalid_argument("plus_state: n out of range");
    const Eigen::Index dim = Eigen::Index{1} << n;
    return Eigen::VectorXcd::Constant(dim, cplx(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
}

double propagate(const IsingProblem& problem, const CoefficientFn& lam, const CoefficientFn& gam, double e_scale,
                 const Eigen::VectorXd& d_scale, double t_f, int steps, Eigen::VectorXcd& psi,
                 const linalg::ExpvOptions& expv) {
    check_spin_inputs(problem, d_scale);
    const int n = problem.size();
    if (n > kEvolveSpinLimit) throw BudgetError("propagate: too many spins for state-vector evolution");
    if (steps < 1) throw std::invalid_argument("propagate: steps must be >= 1");
    if (!(t_f >= 0.0)) throw std::invalid_argument("propagate: t_f must be >= 0");
    const Eigen::Index dim = Eigen::Index{1} << n;
    if (psi.size() != dim) throw std::invalid_argument("propagate: state dimension mismatch");

    const Eigen::VectorXcd diag = classical_diagonal(problem, e_scale).cast<cplx>();
    const double dt = t_f / steps;
    double max_norm_error = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double t_mid = (k + 0.5) * dt;
        const double l = lam(t_mid);
        const double g = gam(t_mid);
        linalg::MatVec<cplx> apply = [&](const linalg::Vector<cplx>& x, linalg::Vector<cplx>& y) {
            y.noalias() = l * diag.cwiseProduct(x);
            for (int i = 0; i < n; ++i) {
                const double amp = g * d_scale(i);
                if (amp == 0.0) continue;
                const Eigen::Index bit = Eigen::Index{1} << i;
                for (Eigen::Index c = 0; c < dim; ++c) y(c) -= amp * x(c ^ bit);
            }
        };
        linalg::expv_hermitian(apply, dt, psi, expv);
        max_norm_error = std::max(max_norm_error, std::abs(psi.norm() - 1.0));
    }
    return max_norm_error;
}

AnnealResult evolve_state(const IsingProblem& problem, const Schedule& schedule, double e_scale,
                          const Eigen::VectorXd& d_scale, const EvolveOptions& options) {
    schedule.validate();
    check_spin_inputs(problem, d_scale);
    const int n = problem.size();
    if (n > kEvolveSpinLimit) {
        std::ostringstream msg;
        msg << "evolve_state: " << n << " spins exceed the limit of " << kEvolveSpinLimit;
        throw BudgetError(msg.str());
    }
    if (options.steps < 2) throw std::invalid_argument("evolve_state: steps must be >= 2");

    const CoefficientFn lam = [&schedule](double t) { return schedule.lambda(t); };
    const CoefficientFn gam = [&schedule](double t) { return schedule.gamma(t); };

    AnnealResult result;
    int steps = options.steps;
    Eigen::VectorXcd previous = plus_state(n);
    double norm_error = propagate(problem, lam, gam, e_scale, d_scale, schedule.t_f, steps, previous, options.expv);
    bool converged = false;
    for (int d = 0; d < options.max_doublings; ++d) {
        steps *= 2;
        Eigen::VectorXcd current = plus_state(n);
        norm_error = std::max(norm_error,
                              propagate(problem, lam, gam, e_scale, d_scale, schedule.t_f, steps, current, options.expv));
        const double overlap = std::norm(previous.dot(current));
        result.fidelity_change = std::abs(1.0 - overlap);
        previous = std::move(current);
        if (result.fidelity_change < options.fidelity_tolerance) {
            converged = true;
            break;
        }
    }
    result.max_norm_error = norm_error;
    if (!converged) {
        std::ostringstream msg;
        msg << "evolve_state: fidelity change " << result.fidelity_change << " after " << steps
            << " steps, target " << options.fidelity_tolerance;
        throw ConvergenceError(msg.str());
    }
    if (norm_error > options.norm_tolerance) {
        std::ostringstream msg;
        msg << "evolve_state: state norm drifted by " << norm_error;
        throw ConvergenceError(msg.str());
    }
    result.steps = steps;
    result.final_state = std::move(previous);
    result.ground_truth = brute_force_ground_state(problem);
    for (std::uint64_t c : result.ground_truth.configurations) {
        result.success_probability += std::norm(result.final_state(static_cast<Eigen::Index>(c)));
    }
    const Eigen::VectorXd probs = result.final_state.cwiseAbs2();
    const double best = probs.maxCoeff();
    for (Eigen::Index c = 0; c < probs.size(); ++c) {
        if (probs(c) >= best - 1e-12) result.decoded.push_back(static_cast<std::uint64_t>(c));
    }
    return result;
}

double thermal_scale(double temperature_mk) {
    if (!(temperature_mk > 0.0)) throw std::invalid_argument("thermal_scale: temperature must be > 0 mK");
    return units::joules_to_ghz(units::kBoltzmann * temperature_mk * units::kMilli);
}

MarginReport margin_report(const Eigen::VectorXd& epsilon, const Eigen::MatrixXd& j, double temperature_mk) {
    if (temperature_mk < 0.0) throw std::invalid_argument("margin_report: temperature must be >= 0");
    MarginReport report;
    report.thermal = temperature_mk == 0.0 ? 0.0 : thermal_scale(temperature_mk);
    auto add = [&report](std::string name, double value) {
        const bool low = std::abs(value) < report.thermal;
        report.items.push_back({std::move(name), value, low});
        report.any_flagged = report.any_flagged || low;
    };
    for (Eigen::Index i = 0; i < epsilon.size(); ++i) add("eps[" + std::to_string(i) + "]", epsilon(i));
    for (Eigen::Index i = 0; i < j.rows(); ++i) {
        for (Eigen::Index k = i + 1; k < j.cols(); ++k) {
            add("J[" + std::to_string(i) + "][" + std::to_string(k) + "]", j(i, k));
        }
    }
    return report;
}

void HardwarePath::validate() const {
    if (n < 1) throw std::invalid_argument("HardwarePath: n must be >= 1");
    qubit.validate();
    resonator.validate();
    if (samples < 2) throw std::invalid_argument("HardwarePath: samples must be >= 2");
    if (coupler_pattern.size() != 0) {
        if (coupler_pattern.rows() != n || coupler_pattern.cols() != n) {
            throw std::invalid_argument("HardwarePath: coupler_pattern must be n x n");
        }
        if (!coupler_pattern.isApprox(coupler_pattern.transpose(), 0.0) || !coupler_pattern.diagonal().isZero(0.0)) {
            throw std::invalid_argument("HardwarePath: coupler_pattern must be symmetric with zero diagonal");
        }
    }
    const double window = two_level.validity_window;
    if (std::abs(f_z_start - 0.5) > window || std::abs(f_z_end - 0.5) > window) {
        throw std::invalid_argument("HardwarePath: f_z ramp leaves the two-level window");
    }
}

std::vector<PathSample> hardware_schedule(const HardwarePath& path, const Schedule& schedule) {
    path.validate();
    schedule.validate();
    const int n = path.n;
    Eigen::MatrixXd pattern = path.coupler_pattern;
    if (pattern.size() == 0) {
        pattern = Eigen::MatrixXd::Ones(n, n);
        pattern.diagonal().setZero();
    }
    std::vector<PathSample> out;
    out.reserve(static_cast<std::size_t>(path.samples));
    for (int k = 0; k < path.samples; ++k) {
        const double s = static_cast<double>(k) / (path.samples - 1);
        PathSample p;
        p.t = s * schedule.t_f;
        p.lambda = schedule.lambda(p.t);
        p.gamma = schedule.gamma(p.t);
        p.f_z = path.f_z_start + s * (path.f_z_end - path.f_z_start);
        p.f_alpha = path.f_alpha_start + s * (path.f_alpha_end - path.f_alpha_start);
        p.g_c = s * path.g_c_end;

        const circuit::QubitCircuitParams at = path.qubit.with_flux(p.f_z, p.f_alpha);
        const circuit::QubitSpectrum spectrum = circuit::solve_spectrum(at, 2, path.two_level.spectrum);
        const double half_gap = 0.5 * (spectrum.energies(1) - spectrum.energies(0));
        double half_gap_sym = half_gap;
        if (p.f_z != 0.5) {
            const circuit::QubitSpectrum sym =
                circuit::solve_spectrum(path.qubit.with_flux(0.5, p.f_alpha), 2, path.two_level.spectrum);
            half_gap_sym = 0.5 * (sym.energies(1) - sym.energies(0));
        }
        const circuit::TwoLevelParams tl = circuit::two_level_from_half_gaps(
            half_gap, half_gap_sym, p.f_z, path.two_level.consistency_tolerance);
        const pair::PairCoupling pc = pair::pair_coupling(spectrum, tl, path.resonator);
        const double omega = path.resonator.omega_r;

        p.delta = Eigen::VectorXd::Constant(n, tl.delta);
        p.delta_eff = Eigen::VectorXd::Constant(n, pair::effective_delta(tl.delta, pc.g_z, omega));
        p.epsilon = Eigen::VectorXd::Constant(n, tl.epsilon);
        p.g_z = Eigen::VectorXd::Constant(n, pc.g_z);
        p.g_x = Eigen::VectorXd::Constant(n, pc.g_x);

        network::NetworkConfig net = network::NetworkConfig::uniform(n, omega, pc.g_z);
        net.g_c = p.g_c * pattern;
        p.j_z = network::effective_J(net).j;
        net.g_z = p.g_x;
        p.j_x = network::effective_J(net).j;
        out.push_back(std::move(p));
    }
    return out;
}

EndpointGate endpoint_gate(const PathSample& last, double temperature_mk, double ratio_limit) {
    EndpointGate gate;
    gate.thermal = thermal_scale(temperature_mk);
    double min_scale = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < last.epsilon.size(); ++i) min_scale = std::min(min_scale, std::abs(last.epsilon(i)));
    for (Eigen::Index i = 0; i < last.j_z.rows(); ++i) {
        for (Eigen::Index k = i + 1; k < last.j_z.cols(); ++k) min_scale = std::min(min_scale, std::abs(last.j_z(i, k)));
    }
    gate.min_scale = min_scale;
    const double delta_max = last.delta_eff.size() ? last.delta_eff.cwiseAbs().maxCoeff() : 0.0;
    gate.ratio = min_scale > 0.0 ? delta_max / min_scale : std::numeric_limits<double>::infinity();
    const bool ratio_ok = gate.ratio < ratio_limit;
    const bool thermal_ok = min_scale > gate.thermal;
    gate.passed = ratio_ok && thermal_ok;
    std::ostringstream msg;
    msg << "Delta_eff/min(|eps|,|J^z|) = " << gate.ratio << " (limit " << ratio_limit << "), min scale "
        << min_scale << " GHz vs thermal " << gate.thermal << " GHz";
    gate.detail = msg.str();
    return gate;
}

}  // namespace fluxnet::anneal
