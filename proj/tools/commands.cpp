#include "commands.hpp"

#include "fluxnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

namespace fluxnet::cli {

using config::Cell;
using config::Table;

namespace {

// Evaluates fn(0..count-1) on up to `threads` workers; results keep input
// order and the lowest-index failure is rethrown.
template <typename T>
std::vector<T> parallel_map(std::size_t count, unsigned threads, const std::function<T(std::size_t)>& fn) {
    std::vector<T> out(count);
    std::vector<std::exception_ptr> errors(count);
    const unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    auto work = [&](unsigned w) {
        for (std::size_t i = w; i < count; i += workers) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

config::Sweep sweep_or_point(const config::RunConfig& run) {
    if (run.sweep) return *run.sweep;
    config::Sweep s;
    s.parameter = "f_z";
    s.start = s.stop = run.qubit.f_z;
    s.samples = 1;
    return s;
}

circuit::QubitCircuitParams at_sweep(const circuit::QubitCircuitParams& base, const std::string& parameter,
                                     double value) {
    circuit::QubitCircuitParams p = base;
    if (parameter == "f_z") {
        p.f_z = value;
    } else if (parameter == "f_alpha") {
        p.f_alpha = value;
    } else {
        p.charge_cutoff = static_cast<int>(std::lround(value));
    }
    return p;
}

const network::NetworkConfig& require_network(const config::RunConfig& run) {
    if (!run.network) throw ConfigError("$.network: required by this command");
    return *run.network;
}

std::uint64_t effective_seed(const Context& ctx) {
    if (ctx.seed) return *ctx.seed;
    if (ctx.run.seed) return *ctx.run.seed;
    throw ConfigError("$.seed: this run needs an explicit seed (config or --seed)");
}

std::vector<IsingProblem> problems_of(const Context& ctx) {
    const auto& run = ctx.run;
    std::vector<IsingProblem> out;
    if (run.problem) {
        out.push_back(*run.problem);
    } else if (run.random_problem) {
        out = config::random_instances(*run.random_problem, effective_seed(ctx));
    } else {
        throw ConfigError("$.problem: required by this command");
    }
    return out;
}

std::string spins_text(std::uint64_t c, int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += spin_of(c, i) > 0 ? '+' : '-';
    return s;
}

std::string pair_name(const char* prefix, int i, int j) {
    return std::string(prefix) + "_" + std::to_string(i) + "_" + std::to_string(j);
}

}  // namespace

Outcome cmd_spectrum(const Context& ctx) {
    const auto& run = ctx.run;
    const config::Sweep sweep = sweep_or_point(run);
    Outcome out;
    out.table.header = {"f_z", "f_alpha", "charge_cutoff"};
    for (int k = 0; k < run.levels; ++k) out.table.header.push_back("E_" + std::to_string(k));
    const std::vector<double> values = sweep.values();
    auto rows = parallel_map<std::vector<Cell>>(values.size(), ctx.threads, [&](std::size_t i) {
        const circuit::QubitCircuitParams p = at_sweep(run.qubit, sweep.parameter, values[i]);
        const circuit::QubitSpectrum s = circuit::solve_spectrum(p, run.levels);
        std::vector<Cell> row{p.f_z, p.f_alpha, static_cast<std::int64_t>(p.charge_cutoff)};
        for (int k = 0; k < run.levels; ++k) row.emplace_back(s.energies(k));
        return row;
    });
    out.table.rows = std::move(rows);
    return out;
}

Outcome cmd_couplings(const Context& ctx) {
    const auto& run = ctx.run;
    const config::Sweep sweep = sweep_or_point(run);
    if (sweep.parameter == "charge_cutoff") throw ConfigError("$.sweep.parameter: couplings sweep f_z or f_alpha");
    Outcome out;
    out.table.header = {"f_z", "f_alpha", "delta", "epsilon", "g_par", "g_perp", "g_z", "g_x"};
    const std::vector<double> values = sweep.values();
    auto rows = parallel_map<std::vector<Cell>>(values.size(), ctx.threads, [&](std::size_t i) {
        const circuit::QubitCircuitParams p = at_sweep(run.qubit, sweep.parameter, values[i]);
        const circuit::TwoLevelParams tl = circuit::extract_two_level(p);
        const circuit::QubitSpectrum s = circuit::solve_spectrum(p, 2);
        const pair::PairCoupling c = pair::pair_coupling(s, tl, run.resonator);
        return std::vector<Cell>{p.f_z, p.f_alpha, tl.delta, tl.epsilon, c.g_par, c.g_perp, c.g_z, c.g_x};
    });
    out.table.rows = std::move(rows);
    return out;
}

Outcome cmd_network(const Context& ctx) {
    const network::NetworkConfig& net = require_network(ctx.run);
    const network::ThetaMatrix theta = network::solve_theta(net);
    const network::EffectiveCouplings j = network::effective_J(net);
    Outcome out;
    out.table.header = {"i", "j", "g_c", "J", "closed_form", "scaling_estimate", "theta_residual", "condition"};
    const int n = net.size();
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            Cell closed = std::string();
            if (n == 2) {
                closed = network::j12_closed_form(net.omega_r(0), net.omega_r(1), net.g_z(0), net.g_z(1), net.g_c(0, 1));
            }
            out.table.rows.push_back({std::int64_t{a}, std::int64_t{b}, net.g_c(a, b), j.j(a, b), closed,
                                      network::scaling_estimate(net, a, b), theta.residual, theta.condition});
        }
    }
    return out;
}

Outcome cmd_embed(const Context& ctx) {
    const auto& run = ctx.run;
    const network::NetworkConfig& hardware = require_network(run);
    const std::vector<IsingProblem> problems = problems_of(ctx);
    if (problems.size() != 1) throw ConfigError("$.problem: embed takes exactly one problem");
    const IsingProblem& target = problems.front();
    const network::EmbedResult res = network::embed_problem(target, hardware, run.embed.scale, run.embed.options);
    const Eigen::MatrixXd achieved = network::effective_J(res.config).j;
    Outcome out;
    out.table.header = {"i", "j", "g_c", "J_target", "J_achieved", "abs_error", "iterations"};
    const int n = target.size();
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const double goal = run.embed.scale * target.j_tilde(a, b);
            out.table.rows.push_back({std::int64_t{a}, std::int64_t{b}, res.config.g_c(a, b), goal, achieved(a, b),
                                      std::abs(achieved(a, b) - goal), std::int64_t{res.iterations}});
        }
    }
    return out;
}

Outcome cmd_verify(const Context& ctx) {
    const auto& run = ctx.run;
    const network::NetworkConfig& net = require_network(run);
    Eigen::VectorXd eps = Eigen::VectorXd::Zero(net.size());
    if (!run.verify.epsilon.empty()) {
        if (static_cast<int>(run.verify.epsilon.size()) != net.size()) {
            throw ConfigError("$.verify.epsilon: needs one entry per qubit");
        }
        eps = Eigen::Map<const Eigen::VectorXd>(run.verify.epsilon.data(), net.size());
    }
    const verify::FullSystemConfig cfg = verify::FullSystemConfig::frozen_config(net, eps, run.verify.n_fock);
    verify::VerifyOptions vopt;
    vopt.n_keep = run.verify.n_keep;
    const verify::VerifyReport report = verify::verify_transformed_hamiltonian(cfg, vopt);

    Outcome out;
    out.table.header = {"record", "i", "j", "n_fock", "value", "reference"};
    const Cell none = std::string();
    for (const auto& t : report.trend) {
        out.table.rows.push_back({std::string("residual"), none, none, std::int64_t{t.n_fock}, t.residual, vopt.tolerance});
    }
    out.table.rows.push_back({std::string("offset"), none, none, std::int64_t{report.n_fock}, report.offset, none});
    if (run.verify.oracle) {
        const verify::ZZFit fit = verify::zz_splitting_oracle(cfg);
        double worst = 0.0;
        for (int a = 0; a < net.size(); ++a) {
            out.table.rows.push_back({std::string("epsilon"), std::int64_t{a}, none, std::int64_t{fit.n_fock},
                                      fit.epsilon(a), eps(a)});
            for (int b = a + 1; b < net.size(); ++b) {
                const double ref = report.j(a, b);
                out.table.rows.push_back({std::string("J"), std::int64_t{a}, std::int64_t{b}, std::int64_t{fit.n_fock},
                                          fit.j(a, b), ref});
                worst = std::max(worst, std::abs(fit.j(a, b) - ref) / std::max(std::abs(ref), 1e-9));
            }
        }
        if (worst > 0.02) {
            std::ostringstream msg;
            msg << "ZZ oracle disagrees with the effective couplings by " << worst * 100.0 << "%";
            out.exit_code = kPhysicsGate;
            out.message = msg.str();
        }
    }
    return out;
}

Outcome cmd_anneal(const Context& ctx) {
    const auto& run = ctx.run;
    Outcome out;
    if (run.path) {
        const anneal::HardwarePath& path = *run.path;
        const std::vector<anneal::PathSample> samples = anneal::hardware_schedule(path, run.schedule.schedule);
        auto& h = out.table.header;
        h = {"t", "lambda", "gamma", "f_z", "f_alpha", "g_c"};
        for (int i = 0; i < path.n; ++i) {
            const std::string s = "_" + std::to_string(i);
            for (const char* name : {"delta", "delta_eff", "epsilon", "g_z", "g_x"}) h.push_back(name + s);
        }
        for (int i = 0; i < path.n; ++i) {
            for (int j = i + 1; j < path.n; ++j) {
                h.push_back(pair_name("Jz", i, j));
                h.push_back(pair_name("Jx", i, j));
            }
        }
        for (const auto& p : samples) {
            std::vector<Cell> row{p.t, p.lambda, p.gamma, p.f_z, p.f_alpha, p.g_c};
            for (int i = 0; i < path.n; ++i) {
                for (double v : {p.delta(i), p.delta_eff(i), p.epsilon(i), p.g_z(i), p.g_x(i)}) row.emplace_back(v);
            }
            for (int i = 0; i < path.n; ++i) {
                for (int j = i + 1; j < path.n; ++j) {
                    row.emplace_back(p.j_z(i, j));
                    row.emplace_back(p.j_x(i, j));
                }
            }
            out.table.rows.push_back(std::move(row));
        }
        const double temperature = run.temperature_mk > 0.0 ? run.temperature_mk : 10.0;
        const anneal::EndpointGate gate = anneal::endpoint_gate(samples.back(), temperature);
        if (!gate.passed) {
            out.exit_code = kPhysicsGate;
            out.message = "endpoint gate failed: " + gate.detail;
        }
        return out;
    }

    const std::vector<IsingProblem> problems = problems_of(ctx);
    const auto& sb = run.schedule;
    out.table.header = {"instance", "n", "t_f", "success_probability", "decoded", "ground_states", "ground_energy",
                        "steps", "fidelity_change", "thermal_flags"};
    auto rows = parallel_map<std::vector<Cell>>(problems.size(), ctx.threads, [&](std::size_t k) {
        const IsingProblem& p = problems[k];
        const int n = p.size();
        Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
        if (!sb.d_scale.empty()) {
            if (static_cast<int>(sb.d_scale.size()) != n) throw ConfigError("$.schedule.d_scale: needs one entry per spin");
            d = Eigen::Map<const Eigen::VectorXd>(sb.d_scale.data(), n);
        }
        anneal::EvolveOptions opt;
        opt.steps = sb.steps;
        const anneal::AnnealResult r = anneal::evolve_state(p, sb.schedule, sb.e_scale, d, opt);
        std::string decoded;
        for (std::size_t c = 0; c < r.decoded.size(); ++c) decoded += (c ? " " : "") + spins_text(r.decoded[c], n);
        std::string truth;
        for (std::size_t c = 0; c < r.ground_truth.configurations.size(); ++c) {
            truth += (c ? " " : "") + spins_text(r.ground_truth.configurations[c], n);
        }
        const anneal::MarginReport margin =
            anneal::margin_report(sb.e_scale * p.eps_tilde, sb.e_scale * p.j_tilde, run.temperature_mk);
        std::int64_t flags = 0;
        for (const auto& item : margin.items) flags += item.below_thermal ? 1 : 0;
        return std::vector<Cell>{static_cast<std::int64_t>(k), std::int64_t{n}, sb.schedule.t_f, r.success_probability,
                                 decoded, truth, r.ground_truth.energy, std::int64_t{r.steps}, r.fidelity_change, flags};
    });
    out.table.rows = std::move(rows);
    return out;
}

ExitCode exit_code_of(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) != nullptr) return kConfig;
    if (dynamic_cast<const ConvergenceError*>(&e) != nullptr) return kConvergence;
    if (dynamic_cast<const BudgetError*>(&e) != nullptr) return kBudget;
    if (dynamic_cast<const PhysicsGateError*>(&e) != nullptr) return kPhysicsGate;
    if (dynamic_cast<const std::invalid_argument*>(&e) != nullptr) return kConfig;
    return kOther;
}

const char* exit_code_name(ExitCode code) {
    switch (code) {
        case kOk: return "ok";
        case kConfig: return "config";
        case kConvergence: return "convergence";
        case kBudget: return "budget";
        case kPhysicsGate: return "physics gate";
        case kOther: break;
    }
    return "error";
}

Outcome run_command(const std::string& name, const Context& ctx) {
    if (name == "spectrum") return cmd_spectrum(ctx);
    if (name == "couplings") return cmd_couplings(ctx);
    if (name == "network") return cmd_network(ctx);
    if (name == "embed") return cmd_embed(ctx);
    if (name == "verify") return cmd_verify(ctx);
    if (name == "anneal") return cmd_anneal(ctx);
    throw ConfigError("unknown command '" + name + "'");
}

}  // namespace fluxnet::cli
