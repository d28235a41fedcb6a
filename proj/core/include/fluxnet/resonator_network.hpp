#pragma once

// Network of N qubit-resonator pairs joined by tunable resonator-resonator
// couplers: the coupling matrix G, the displacement amplitudes theta, the
// effective qubit-qubit couplings J, and the inverse map (problem embedding).

#include "fluxnet/ising.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace fluxnet::network {

/// J_ij = -kConventionFactor * g_i g_j (G^-1)_ij for the pair sum over i < j.
/// Fixed by the exact-diagonalization ZZ fit (see hamiltonian_verify); it is
/// also what the closed-form two-pair expression implies.
inline constexpr double kConventionFactor = 2.0;

/// Condition number of G above which a solve is refused.
inline constexpr double kConditionLimit = 1e12;

struct NetworkConfig {
    Eigen::VectorXd omega_r; // GHz, resonator energies
    Eigen::VectorXd g_z;     // GHz, qubit-resonator longitudinal couplings
    Eigen::MatrixXd g_c;     // GHz, symmetric resonator couplers, zero diagonal

    int size() const { return static_cast<int>(omega_r.size()); }
    void validate() const;

    /// Uniform omega and g, zero couplers.
    static NetworkConfig uniform(int n, double omega, double g);
};

/// G_ii = omega_i, G_ij = 2 g_c_ij.
Eigen::MatrixXd build_G(const NetworkConfig& config);

/// 2-norm condition number of a symmetric matrix.
double condition_number(const Eigen::MatrixXd& symmetric);

struct ThetaMatrix {
    Eigen::MatrixXd theta;  // theta(i, k) = g_i (G^-1)_{ki}
    double residual = 0.0;  // max-norm of the constraint residual, GHz
    double condition = 0.0; // condition number of G
};

/// max_ij |g_i delta_ij - sum_k (2 g_c_kj + omega_k delta_kj) theta_ik|.
double theta_residual(const NetworkConfig& config, const Eigen::MatrixXd& theta);

/// Linear solve of the constraint system. Throws PhysicsGateError if G is
/// singular or its condition number exceeds kConditionLimit.
ThetaMatrix solve_theta(const NetworkConfig& config);

/// The same theta from determinant ratios (Cramer's rule); n <= 4 only.
Eigen::MatrixXd solve_theta_cramer(const NetworkConfig& config);

struct EffectiveCouplings {
    Eigen::MatrixXd j;               // GHz, symmetric, zero diagonal
    double convention_factor = kConventionFactor;
    double condition = 0.0;
};

EffectiveCouplings effective_J(const NetworkConfig& config, double convention_factor = kConventionFactor);

/// 4 g1 g2 gc / (omega1 omega2 - (2 gc)^2). Throws std::domain_error on the
/// resonance (relative denominator below 1e-12).
double j12_closed_form(double omega1, double omega2, double g1, double g2, double gc);

/// (g_i/omega_i)(g_j/omega_j) g_c_ij, an order-of-magnitude estimate with unit
/// proportionality constant.
double scaling_estimate(const NetworkConfig& config, int i, int j);

/// (M / L_r)^2 M_c I_1 I_2 / h in GHz, with M and M_c in pH, L_r in nH and
/// the persistent currents in nA.
double j12_circuit(double m_ph, double l_r_nh, double m_c_ph, double iq1_na, double iq2_na);

struct EmbedOptions {
    double convention_factor = kConventionFactor;
    /// Declared coupler range |g_c| <= max_coupler (GHz).
    double max_coupler = 1.0;
    /// Declared target scale range [0, max_scale] (GHz).
    double max_scale = 2.0;
    int max_iterations = 100;
    double tolerance = 1e-10; // GHz, max-norm of the J residual
};

struct EmbedResult {
    NetworkConfig config;
    int iterations = 0;
    double residual = 0.0;
};

/// Coupler values (a, b) with |g_c| beyond the declared range.
struct CouplerViolation {
    int i = 0;
    int j = 0;
    double g_c = 0.0;
};

/// Coupler settings g_c such that effective_J reproduces scale * J_tilde.
/// Damped Newton iteration on the upper-triangle couplers, started from the
/// first-order guess g_c = J omega_i omega_j / (2 kappa g_i g_j). The step is
/// halved while the residual grows or G stops being positive definite.
///
/// Throws std::invalid_argument on a bad scale or shape, PhysicsGateError
/// listing the offending pairs when the solution leaves the coupler range,
/// and ConvergenceError with the best residual otherwise.
EmbedResult embed_problem(const IsingProblem& target, const NetworkConfig& hardware, double scale,
                          const EmbedOptions& options = {});

/// Pairs of `config` outside |g_c| <= limit.
std::vector<CouplerViolation> coupler_violations(const NetworkConfig& config, double limit);

}  // namespace fluxnet::network
