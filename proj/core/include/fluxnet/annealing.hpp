#pragma once

// Stoquastic transverse-field Ising annealing on the effective spin model:
// Hamiltonian, schedules, time evolution, the brute-force oracle, and the
// hardware-derived coefficient path.

#include "fluxnet/circuit_spectrum.hpp"
#include "fluxnet/ising.hpp"
#include "fluxnet/pair_coupling.hpp"
#include "fluxnet/resonator_network.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fluxnet::anneal {

using cplx = std::complex<double>;

/// Dense spin Hamiltonians are limited to 2^kDenseSpinLimit states.
inline constexpr int kDenseSpinLimit = 12;
/// State-vector evolution limit.
inline constexpr int kEvolveSpinLimit = 14;

/// Envelope shape on the normalized time s = t / t_f.
enum class Envelope { kLinear, kQuadratic, kSine };

double envelope_value(Envelope shape, double s);

struct Schedule {
    double t_f = 100.0; // 1/GHz
    Envelope lambda_shape = Envelope::kLinear; // Lambda(s) = shape(s)
    Envelope gamma_shape = Envelope::kLinear;  // Gamma(s) = 1 - shape(s)

    double lambda(double t) const;
    double gamma(double t) const;
    /// Throws std::invalid_argument unless t_f > 0.
    void validate() const;

    static Schedule linear(double t_f);
};

/// lam * e_scale * (sum eps s + sum_{i<j} J s s) - gam * sum_i d_scale_i sx_i.
/// The transverse sign keeps every off-diagonal element non-positive, so the
/// ground state at lam = 0 is the all-|+> product. Basis bit i set means
/// sz_i = -1. Requires 0 <= lam, gam <= 1, d_scale >= 0 and n <= kDenseSpinLimit.
Eigen::MatrixXd build_qa_hamiltonian(const IsingProblem& problem, double lam, double gam, double e_scale,
                                     const Eigen::VectorXd& d_scale);

struct GroundTruth {
    std::vector<std::uint64_t> configurations; // all minimizers
    double energy = 0.0;
};

/// Exhaustive search over 2^n configurations; n <= 20.
GroundTruth brute_force_ground_state(const IsingProblem& problem);

struct EvolveOptions {
    int steps = 64;            // initial piecewise-constant steps
    int max_doublings = 16;
    double fidelity_tolerance = 1e-8;
    double norm_tolerance = 1e-10;
    linalg::ExpvOptions expv{30, 1e-13};
};

struct AnnealResult {
    Eigen::VectorXcd final_state;
    double success_probability = 0.0;
    std::vector<std::uint64_t> decoded; // most probable configuration(s)
    GroundTruth ground_truth;
    int steps = 0;                 // steps of the accepted run
    double fidelity_change = 0.0;  // 1 - |<psi_steps/2|psi_steps>|^2
    double max_norm_error = 0.0;
};

/// Time-dependent coefficients of the spin model, lam(t) and gam(t).
using CoefficientFn = std::function<double(double)>;

/// Piecewise-constant propagation with `steps` midpoint steps from psi over
/// [0, t_f]. Returns the largest | |psi| - 1 | seen after any step.
double propagate(const IsingProblem& problem, const CoefficientFn& lam, const CoefficientFn& gam, double e_scale,
                 const Eigen::VectorXd& d_scale, double t_f, int steps, Eigen::VectorXcd& psi,
                 const linalg::ExpvOptions& expv = {});

/// All-|+> product state on n spins.
Eigen::VectorXcd plus_state(int n);

/// Anneals from the all-|+> state. The step count doubles until the
/// final-state fidelity changes by less than the tolerance; throws
/// ConvergenceError otherwise or if the norm drifts beyond norm_tolerance.
AnnealResult evolve_state(const IsingProblem& problem, const Schedule& schedule, double e_scale,
                          const Eigen::VectorXd& d_scale, const EvolveOptions& options = {});

/// k_B T / h in GHz for T in mK (> 0).
double thermal_scale(double temperature_mk);

struct MarginItem {
    std::string name; // "eps[i]" or "J[i][j]"
    double value = 0.0;
    bool below_thermal = false;
};

struct MarginReport {
    double thermal = 0.0;
    std::vector<MarginItem> items;
    bool any_flagged = false;
};

/// Compares |eps_i| and |J_ij| (i < j) against thermal_scale(T). T = 0 flags nothing.
MarginReport margin_report(const Eigen::VectorXd& epsilon, const Eigen::MatrixXd& j, double temperature_mk);

/// Linear flux and coupler ramps of the hardware path.
struct HardwarePath {
    int n = 2;
    circuit::QubitCircuitParams qubit{5.0, 250.0, 0.8, 1.1, 0.5, 0.0, 7, false, circuit::AlphaLoopGauge::kSymmetric};
    pair::ResonatorParams resonator{};
    double f_z_start = 0.5;
    double f_z_end = 0.4997;
    double f_alpha_start = 0.21;
    double f_alpha_end = 0.0;
    double g_c_end = 0.4;              // GHz
    Eigen::MatrixXd coupler_pattern;   // n x n, zero diagonal; empty means all ones
    int samples = 11;
    circuit::TwoLevelOptions two_level{};

    void validate() const;
};

struct PathSample {
    double t = 0.0;
    double lambda = 0.0;
    double gamma = 0.0;
    double f_z = 0.0;
    double f_alpha = 0.0;
    double g_c = 0.0;
    Eigen::VectorXd delta;     // GHz, bare transverse energy
    Eigen::VectorXd delta_eff; // GHz, after deep-strong suppression
    Eigen::VectorXd epsilon;   // GHz
    Eigen::VectorXd g_z;       // GHz
    Eigen::VectorXd g_x;       // GHz
    Eigen::MatrixXd j_z;       // GHz
    Eigen::MatrixXd j_x;       // GHz
};

/// Qubit spectrum -> pair couplings -> network couplings at evenly spaced
/// times on [0, t_f]. All qubits share the circuit parameters, so one
/// spectrum per sample serves every qubit.
std::vector<PathSample> hardware_schedule(const HardwarePath& path, const Schedule& schedule);

struct EndpointGate {
    double ratio = 0.0;     // max_i Delta_eff_i / min(|eps|, |J^z|)
    double min_scale = 0.0; // min over |eps_i| and |J^z_ij|
    double thermal = 0.0;
    bool passed = false;
    std::string detail;
};

/// Delta_eff < 0.01 min(|eps|, |J^z|) and every final scale above thermal_scale(T).
EndpointGate endpoint_gate(const PathSample& last, double temperature_mk, double ratio_limit = 0.01);

}  // namespace fluxnet::anneal
