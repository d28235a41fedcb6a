#pragma once

// Full N-pair qubit-resonator Hamiltonian on truncated Fock spaces, the
// conditional displacement U that removes the qubit-resonator cross terms
// when Delta = g_x = 0, numerical verification of the transformed form, and
// the exact-diagonalization ZZ fit used as an oracle for J.
//
// Basis ordering: index = sector * F^N + sum_l n_l F^(N-1-l). Bit i of the
// sector set means sigma_i^z = -1.

#include "fluxnet/linalg.hpp"
#include "fluxnet/resonator_network.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <string>
#include <vector>

namespace fluxnet::verify {

using SparseReal = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct FullSystemConfig {
    network::NetworkConfig network;
    Eigen::VectorXd epsilon; // GHz, per qubit
    Eigen::VectorXd delta;   // GHz, per qubit
    Eigen::VectorXd g_x;     // GHz, per qubit
    int n_fock = 16;         // photon states per resonator
    /// Largest total Hilbert dimension 2^N F^N that may be assembled.
    std::int64_t dimension_budget = 2'000'000;
    /// Largest number of entries of a dense matrix.
    std::int64_t dense_entry_budget = 2'000'000;

    int size() const { return network.size(); }
    std::int64_t fock_dimension() const;
    std::int64_t dimension() const;
    bool frozen() const; // Delta = g_x = 0
    void validate() const;

    /// Delta = g_x = 0 with the given longitudinal energies.
    static FullSystemConfig frozen_config(const network::NetworkConfig& network, const Eigen::VectorXd& epsilon,
                                          int n_fock);
    FullSystemConfig with_fock(int n_fock_new) const;
};

/// sum_i (eps_i sz_i + Delta_i sx_i) + omega_i (n_i + 1/2) + (g_z_i sz_i + g_x_i sx_i) x_i
/// + sum_{i<j} g_c_ij x_i x_j, with x = a + a^dag. Throws BudgetError when the
/// dimension exceeds the budget.
SparseReal build_full_hamiltonian(const FullSystemConfig& config);

/// The Fock-space block of one qubit sector (requires Delta = g_x = 0).
SparseReal build_sector_hamiltonian(const FullSystemConfig& config, std::uint32_t sector);

struct DisplacementUnitary {
    Eigen::MatrixXd u;
    double unitarity_deficit = 0.0; // max |U^T U - 1|
};

/// exp[sum_kl -theta_kl sz_k (a_l^dag - a_l)] on the full truncated space, by
/// dense exponentiation of the generator. Throws BudgetError beyond the dense
/// budget and ConvergenceError when the unitarity deficit exceeds 1e-8.
DisplacementUnitary build_displacement_unitary(const Eigen::MatrixXd& theta, const FullSystemConfig& config);

/// Displacement amplitude beta_l(s) = -sum_k theta_kl s_k of mode l in a sector.
Eigen::VectorXd sector_displacement(const Eigen::MatrixXd& theta, std::uint32_t sector);

/// Energy shift -sum_k g_k^2 (G^-1)_kk that the transformation adds on top of
/// the printed transformed form.
double self_energy_offset(const network::NetworkConfig& network);

/// Low-lying levels of the predicted transformed Hamiltonian in one sector:
/// sum eps s + sum_{i<j} J s s + offset plus the normal modes of the coupled
/// resonators. Ascending, `count` values.
Eigen::VectorXd predicted_sector_levels(const FullSystemConfig& config, std::uint32_t sector, int count,
                                        double convention_factor = network::kConventionFactor);

struct TruncationSample {
    int n_fock = 0;
    double residual = 0.0;
};

struct VerifyOptions {
    /// Photon states per mode kept in the comparison block.
    int n_keep = 4;
    /// Starting truncation; 0 picks n_keep + 4 max|beta|^2 + 8.
    int initial_fock = 0;
    int max_fock = 1024;
    /// Doublings always performed, so the trend has min_doublings + 1 points.
    int min_doublings = 3;
    double tolerance = 1e-6;
    double convention_factor = network::kConventionFactor;
};

struct VerifyReport {
    double residual = 0.0; // max |U^T H U - H'| / max |H| on the kept block
    double h_norm = 0.0;
    double offset = 0.0;
    int n_fock = 0;
    bool passed = false;
    std::vector<TruncationSample> trend;
    Eigen::MatrixXd j;
};

/// Relative residual at one truncation.
double transformed_residual(const FullSystemConfig& config, int n_fock, int n_keep, double convention_factor,
                            double* h_norm = nullptr);

/// Compares U^T H U with the predicted transformed Hamiltonian on the
/// low-photon block of every sector, doubling the truncation until the
/// relative residual drops below tolerance. Requires Delta = g_x = 0. Throws
/// ConvergenceError with the trend if max_fock is reached first.
VerifyReport verify_transformed_hamiltonian(const FullSystemConfig& config, const VerifyOptions& options = {});

struct ZZOptions {
    linalg::LanczosOptions lanczos{1e-10, 3000, 10, 0x5eedf1a5ULL};
    /// Sector blocks up to this size are diagonalized densely.
    Eigen::Index dense_limit = 1200;
    /// Increase n_fock by 50% until the fitted couplings move by less than this (GHz).
    double fock_tolerance = 1e-10;
    int max_fock = 160;
    bool converge_fock = true;
};

struct ZZFit {
    Eigen::MatrixXd j;              // fitted pair couplings, GHz
    Eigen::VectorXd epsilon;        // fitted longitudinal terms, GHz
    double constant = 0.0;          // fitted constant, GHz
    Eigen::VectorXd sector_energies; // ground energy of each sector
    double fit_residual = 0.0;      // max |E(s) - model(s)|, higher-order terms
    double min_sector_gap = 0.0;    // smallest ground-to-first-excited gap in any sector
    int n_fock = 0;
};

/// Ground energy of every qubit sector by exact diagonalization and the
/// Walsh projection E(s) = sum eps_i s_i + sum_{i<j} J_ij s_i s_j + c.
/// Requires Delta = g_x = 0, so sector labels are exact; a vanishing
/// ground-state gap inside a sector is reported as a PhysicsGateError.
ZZFit zz_splitting_oracle(const FullSystemConfig& config, const ZZOptions& options = {});

}  // namespace fluxnet::verify
