#pragma once

// Qubit-resonator pair: coupling constants through the shared beta junction,
// rotation into the persistent-current basis, the pair Hamiltonian on a
// truncated Fock space, and deep-strong-coupling displacement effects.

#include "fluxnet/circuit_spectrum.hpp"

#include <Eigen/Dense>

namespace fluxnet::pair {

using circuit::TwoLevelParams;

struct ResonatorParams {
    double omega_r = 7.2; // GHz
    double i_r = 41.0;    // nA, root-mean-square resonator current
    double l_r = 1.4;     // nH, effective resonator inductance

    void validate() const;
};

struct PairCoupling {
    double g_par = 0.0;  // GHz, along sigma_z' (energy eigenbasis)
    double g_perp = 0.0; // GHz, along sigma_x'
    double g_z = 0.0;    // GHz, along sigma_z (persistent-current basis)
    double g_x = 0.0;    // GHz, along sigma_x
};

/// Matrix elements <m|phi|m'> of the periodic phase on the branch (-pi, pi]
/// over charges m, m' in [-cutoff, cutoff]: zero diagonal and
/// -i (-1)^(m'-m) / (m'-m) elsewhere.
Eigen::MatrixXcd phase_operator_matrix(int cutoff);

/// <Psi_a| phi_beta |Psi_b> with phi_beta acting on the beta charge index.
std::complex<double> beta_phase_element(const Eigen::VectorXcd& bra, const Eigen::VectorXcd& ket,
                                        int cutoff);

struct BareCouplings {
    double g_par = 0.0;
    double g_perp = 0.0;
    /// <Psi_0|dH/df_z|Psi_1> (GHz per flux quantum) after orienting |Psi_1>;
    /// non-positive by construction.
    double transition_slope = 0.0;
};

/// g_par and g_perp (GHz) from the two lowest eigenstates of a spectrum in
/// the solve_spectrum gauge, where both matrix elements are real. The sign of
/// |Psi_1> is oriented so that <Psi_0|dH/df_z|Psi_1> <= 0, which places
/// sigma_z = +1 on the state whose energy rises with f_z. Throws
/// PhysicsGateError when an imaginary remainder above 1e-8 GHz survives.
BareCouplings compute_bare_couplings(const circuit::QubitSpectrum& spectrum,
                                     const ResonatorParams& resonator);

struct RotatedCouplings {
    double g_z = 0.0;
    double g_x = 0.0;
};

/// Rotate (g_par, g_perp) into the persistent-current basis, with
/// cos(eta) = eps / omega_q and sin(eta) = Delta / omega_q.
RotatedCouplings rotate_couplings(double g_par, double g_perp, const TwoLevelParams& two_level);

/// Bare couplings followed by the rotation.
PairCoupling pair_coupling(const circuit::QubitSpectrum& spectrum, const TwoLevelParams& two_level,
                           const ResonatorParams& resonator);

/// ceil(4 (g / omega)^2) + 16.
int default_fock_truncation(double g, double omega_r);

/// Lowering operator a on n_fock Fock states.
Eigen::MatrixXd annihilation(int n_fock);

/// exp[beta (a^dag - a)] on n_fock states. With pad = 0 the generator is
/// exponentiated in the truncated space itself (exactly orthogonal); with
/// pad > 0 it is exponentiated on n_fock + pad states and cropped, which gives
/// the untruncated matrix elements to machine precision for low indices.
Eigen::MatrixXd displacement_matrix(double beta, int n_fock, int pad = 0);

struct PairHamiltonian {
    Eigen::MatrixXd matrix; // (qubit x Fock), qubit index 0 = sigma_z' = +1 = |Psi_1>
    int n_fock = 0;
    TwoLevelParams two_level;
    ResonatorParams resonator;
    PairCoupling coupling;
};

/// omega_r (a^dag a + 1/2) + omega_q sigma_z' + (g_par sigma_z' + g_perp sigma_x')(a^dag + a).
PairHamiltonian build_pair_hamiltonian(const TwoLevelParams& two_level, const ResonatorParams& resonator,
                                       const PairCoupling& coupling, int n_fock);

/// The same pair in the persistent-current basis:
/// eps sigma_z + delta sigma_x + omega_r (a^dag a + 1/2) + (g_z sigma_z + g_x sigma_x)(a^dag + a).
/// Signs are taken as given, so a negative delta is allowed.
Eigen::MatrixXd build_current_basis_pair_hamiltonian(double epsilon, double delta, double omega_r,
                                                     double g_z, double g_x, int n_fock);

/// Delta * exp[-2 (g_z / omega_r)^2].
double effective_delta(double delta, double g_z, double omega_r);

/// exp[-(g_z/omega_r) sigma_z (a^dag - a)] |+> (x) |n>, i.e.
/// (|up> D(-g_z/omega_r)|n> + |down> D(+g_z/omega_r)|n>) / sqrt(2), on n_fock
/// photon states in the (qubit x Fock) ordering. Throws ConvergenceError when
/// the truncated norm deficit exceeds 1e-8.
Eigen::VectorXd displaced_state(int n, double g_z, double omega_r, int n_fock);

}  // namespace fluxnet::pair
