#pragma once

// Flux-qubit circuit with a shared-line beta junction: charge-basis
// Hamiltonian, its low-lying spectrum, and the two-level reduction (Delta, eps).

#include "fluxnet/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>

namespace fluxnet::circuit {

using cplx = std::complex<double>;
using SparseHamiltonian = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Where the alpha-loop flux enters the phase of the combined alpha-branch
/// cosine.
enum class AlphaLoopGauge {
    /// Phase offset 2*pi*f_z. The main-loop bias is measured so that the
    /// degeneracy point sits at f_z = 0.5 for every f_alpha.
    kSymmetric,
    /// Phase offset pi*(2 f_z - f_alpha). The degeneracy point moves to
    /// f_z = 0.5 + f_alpha / 2.
    kLiteral,
};

struct QubitCircuitParams {
    double e_c = 5.0;     // GHz, E_c / h
    double e_j = 250.0;   // GHz, E_J / h
    double alpha = 0.7;   // alpha-junction ratio
    double beta = 4.0;    // beta-junction ratio
    double f_z = 0.5;     // main-loop flux, units of Phi_0
    double f_alpha = 0.0; // alpha-loop flux, units of Phi_0
    int charge_cutoff = 7;
    /// Weight the beta-junction cosine by 1 instead of beta.
    bool unit_beta_cosine = false;
    AlphaLoopGauge gauge = AlphaLoopGauge::kSymmetric;

    /// Throws std::invalid_argument on any violated invariant, including an
    /// indefinite kinetic form.
    void validate() const;

    /// Charges per phase axis, 2 * cutoff + 1.
    int axis_size() const { return 2 * charge_cutoff + 1; }
    /// Dimension of the three-phase charge basis.
    Eigen::Index dimension() const;

    /// Symmetric 3x3 matrix K (GHz) with kinetic energy n^T K n over the
    /// integer charge numbers (n_a, n_b, n_beta).
    Eigen::Matrix3d kinetic_form() const;

    /// Phase offset of the alpha-branch cosine for the selected gauge.
    double alpha_branch_phase() const;

    QubitCircuitParams with_flux(double f_z_new, double f_alpha_new) const;
    QubitCircuitParams with_cutoff(int cutoff) const;
};

/// Index of the charge state (k, l, m), each in [-cutoff, cutoff].
Eigen::Index charge_index(int cutoff, int k, int l, int m);

/// Sparse Hermitian qubit Hamiltonian (GHz) in the charge basis.
///
/// The kinetic part is diagonal. Each single-phase cosine hops one charge
/// index by +-1 with amplitude -E_J/2 (times beta for the beta junction); the
/// alpha-branch cosine hops all three indices together with amplitude
/// -E_J alpha cos(pi f_alpha) exp(+-i phase) / 2. Raising a charge index by one
/// corresponds to multiplication by exp(+i phi).
SparseHamiltonian build_qubit_hamiltonian(const QubitCircuitParams& params);

/// dH/df_z (GHz per flux quantum): the alpha-branch cosine differentiated with
/// respect to the main-loop bias. Its projection on the two lowest states is
/// proportional to the persistent-current operator.
SparseHamiltonian build_flux_derivative(const QubitCircuitParams& params);

enum class EigenMethod { kAuto, kDense, kLanczos };

struct SpectrumOptions {
    EigenMethod method = EigenMethod::kAuto;
    /// kAuto switches to Lanczos above this basis dimension.
    Eigen::Index dense_limit = 1000;
    linalg::LanczosOptions lanczos{};
};

struct QubitSpectrum {
    Eigen::VectorXd energies;     // GHz, ascending
    Eigen::MatrixXcd eigenvectors; // columns C^xi over the charge basis
    QubitCircuitParams params;
    double max_residual = 0.0;
};

/// Lowest `count` eigenpairs.
///
/// Gauge: the Hamiltonian is real in the phase representation, i.e. invariant
/// under charge reversal combined with complex conjugation. Each eigenvector
/// is phased to be invariant under that map (C_{-k,-l,-m} = conj C_{k,l,m}),
/// leaving a sign, chosen so the largest-magnitude coefficient has positive
/// real part (positive imaginary part if it is purely imaginary). Operators
/// that are real in the phase representation then have real matrix elements.
QubitSpectrum solve_spectrum(const QubitCircuitParams& params, int count,
                             const SpectrumOptions& options = {});

struct TwoLevelParams {
    double delta = 0.0;   // GHz, transverse energy
    double epsilon = 0.0; // GHz, longitudinal energy
    double omega_q = 0.0; // GHz, sqrt(delta^2 + epsilon^2)
};

struct TwoLevelOptions {
    /// Allowed |f_z - 0.5|.
    double validity_window = 0.01;
    /// Relative slack on (gap/2)^2 - delta^2 before reporting inconsistency.
    double consistency_tolerance = 1e-8;
    SpectrumOptions spectrum{};
};

/// Two-level reduction from half-gaps already computed at the requested bias
/// and at f_z = 0.5 (same f_alpha).
TwoLevelParams two_level_from_half_gaps(double half_gap_at_bias, double half_gap_at_symmetry,
                                        double f_z, double consistency_tolerance = 1e-8);

/// Delta from the half-gap at f_z = 0.5, epsilon from the half-gap at the
/// requested bias, sign(epsilon) = sign(f_z - 0.5).
TwoLevelParams extract_two_level(const QubitCircuitParams& params,
                                 const TwoLevelOptions& options = {});

/// Persistent current (nA) implied by a linear epsilon(f_z) through 0.5.
double persistent_current_na(const TwoLevelParams& two_level, double f_z);

}  // namespace fluxnet::circuit
