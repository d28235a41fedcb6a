#include "fluxnet/pair_coupling.hpp"

#include "fluxnet/errors.hpp"
#include "fluxnet/units.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fluxnet::pair {

using cplx = std::complex<double>;

void ResonatorParams::validate() const {
    if (!(omega_r > 0.0)) throw std::invalid_argument("ResonatorParams: omega_r must be > 0");
    if (!(i_r >= 0.0)) throw std::invalid_argument("ResonatorParams: i_r must be >= 0");
    if (!(l_r > 0.0)) throw std::invalid_argument("ResonatorParams: l_r must be > 0");
}

Eigen::MatrixXcd phase_operator_matrix(int cutoff) {
    if (cutoff < 1) throw std::invalid_argument("phase_operator_matrix: cutoff must be >= 1");
    const int n = 2 * cutoff + 1;
    Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const int diff = j - i;  // m' - m
            const double sign = (diff % 2 == 0) ? 1.0 : -1.0;
            phi(i, j) = cplx(0.0, -sign / diff);
        }
    }
    return phi;
}

cplx beta_phase_element(const Eigen::VectorXcd& bra, const Eigen::VectorXcd& ket, int cutoff) {
    const Eigen::Index n = 2 * cutoff + 1;
    if (bra.size() != n * n * n || ket.size() != n * n * n) {
        throw std::invalid_argument("beta_phase_element: vector size does not match the charge basis");
    }
    // The beta charge is the fastest index: view vectors as n x n^2 with the
    // beta charge along rows.
    const Eigen::Map<const Eigen::MatrixXcd> b(bra.data(), n, n * n);
    const Eigen::Map<const Eigen::MatrixXcd> k(ket.data(), n, n * n);
    const Eigen::MatrixXcd phi = phase_operator_matrix(cutoff);
    return b.conjugate().cwiseProduct(phi * k).sum();
}

BareCouplings compute_bare_couplings(const circuit::QubitSpectrum& spectrum,
                                     const ResonatorParams& resonator) {
    resonator.validate();
    if (spectrum.eigenvectors.cols() < 2) {
        throw std::invalid_argument("compute_bare_couplings: spectrum needs at least two states");
    }
    const int cutoff = spectrum.params.charge_cutoff;
    const Eigen::VectorXcd psi0 = spectrum.eigenvectors.col(0);
    const Eigen::VectorXcd psi1 = spectrum.eigenvectors.col(1);

    // (1/2) I_r x (1/2) Phi_0 per radian of beta-junction phase.
    const double prefactor = units::current_flux_to_ghz(0.5 * resonator.i_r, 0.5);

    const cplx diag0 = beta_phase_element(psi0, psi0, cutoff);
    const cplx diag1 = beta_phase_element(psi1, psi1, cutoff);
    const cplx off = beta_phase_element(psi0, psi1, cutoff);

    // Relative sign of |Psi_1>: in the persistent-current basis dH/df_z is
    // eps' sigma_z with eps' > 0, whose element <Psi_0|.|Psi_1> equals
    // -eps' sin(eta) < 0.
    const circuit::SparseHamiltonian dh = circuit::build_flux_derivative(spectrum.params);
    const Eigen::VectorXcd dh_psi1 = dh * psi1;
    const cplx slope = psi0.dot(dh_psi1);
    double orientation = 1.0;
    if (slope.real() > 0.0) orientation = -1.0;

    BareCouplings out;
    const cplx g_par = prefactor * (diag1 - diag0);
    const cplx g_perp = prefactor * orientation * (off + std::conj(off));
    const double imag_residual =
        std::max(std::abs(g_par.imag()), std::abs(2.0 * prefactor * off.imag()));
    if (imag_residual > 1e-8) {
        std::ostringstream msg;
        msg << "compute_bare_couplings: imaginary coupling remainder " << imag_residual << " GHz";
        throw PhysicsGateError(msg.str());
    }
    out.g_par = g_par.real();
    out.g_perp = g_perp.real();
    out.transition_slope = orientation * slope.real();
    return out;
}

RotatedCouplings rotate_couplings(double g_par, double g_perp, const TwoLevelParams& two_level) {
    if (!(two_level.omega_q > 0.0)) {
        throw std::invalid_argument("rotate_couplings: omega_q must be > 0");
    }
    const double cos_eta = two_level.epsilon / two_level.omega_q;
    const double sin_eta = two_level.delta / two_level.omega_q;
    return {g_par * cos_eta - g_perp * sin_eta, g_par * sin_eta + g_perp * cos_eta};
}

PairCoupling pair_coupling(const circuit::QubitSpectrum& spectrum, const TwoLevelParams& two_level,
                           const ResonatorParams& resonator) {
    const BareCouplings bare = compute_bare_couplings(spectrum, resonator);
    const RotatedCouplings rotated = rotate_couplings(bare.g_par, bare.g_perp, two_level);
    return {bare.g_par, bare.g_perp, rotated.g_z, rotated.g_x};
}

int default_fock_truncation(double g, double omega_r) {
    const double ratio = g / omega_r;
    return static_cast<int>(std::ceil(4.0 * ratio * ratio)) + 16;
}

Eigen::MatrixXd annihilation(int n_fock) {
    if (n_fock < 1) throw std::invalid_argument("annihilation: n_fock must be >= 1");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_fock, n_fock);
    for (int n = 1; n < n_fock; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Eigen::MatrixXd displacement_matrix(double beta, int n_fock, int pad) {
    if (pad < 0) throw std::invalid_argument("displacement_matrix: pad must be >= 0");
    const int size = n_fock + pad;
    const Eigen::MatrixXd a = annihilation(size);
    const Eigen::MatrixXd generator = beta * (a.transpose() - a);
    const Eigen::MatrixXd full = generator.exp();
    return full.topLeftCorner(n_fock, n_fock);
}

PairHamiltonian build_pair_hamiltonian(const TwoLevelParams& two_level, const ResonatorParams& resonator,
                                       const PairCoupling& coupling, int n_fock) {
    resonator.validate();
    if (n_fock < 2) throw std::invalid_argument("build_pair_hamiltonian: n_fock must be >= 2");
    const Eigen::MatrixXd a = annihilation(n_fock);
    const Eigen::MatrixXd x = a + a.transpose();
    const Eigen::MatrixXd number = a.transpose() * a;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n_fock, n_fock);
    Eigen::Matrix2d sz;
    sz << 1, 0, 0, -1;
    Eigen::Matrix2d sx;
    sx << 0, 1, 1, 0;

    PairHamiltonian out;
    out.n_fock = n_fock;
    out.two_level = two_level;
    out.resonator = resonator;
    out.coupling = coupling;
    out.matrix = Eigen::MatrixXd::Zero(2 * n_fock, 2 * n_fock);
    const Eigen::MatrixXd oscillator = resonator.omega_r * (number + 0.5 * id);
    const Eigen::Matrix2d spin_coupling = coupling.g_par * sz + coupling.g_perp * sx;
    for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
            auto block = out.matrix.block(p * n_fock, q * n_fock, n_fock, n_fock);
            if (p == q) block += oscillator + two_level.omega_q * sz(p, p) * id;
            block += spin_coupling(p, q) * x;
        }
    }
    return out;
}

Eigen::MatrixXd build_current_basis_pair_hamiltonian(double epsilon, double delta, double omega_r,
                                                     double g_z, double g_x, int n_fock) {
    if (!(omega_r > 0.0)) throw std::invalid_argument("omega_r must be > 0");
    if (n_fock < 2) throw std::invalid_argument("n_fock must be >= 2");
    const Eigen::MatrixXd a = annihilation(n_fock);
    const Eigen::MatrixXd x = a + a.transpose();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n_fock, n_fock);
    const Eigen::MatrixXd oscillator = omega_r * (a.transpose() * a + 0.5 * id);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * n_fock, 2 * n_fock);
    h.topLeftCorner(n_fock, n_fock) = oscillator + epsilon * id + g_z * x;
    h.bottomRightCorner(n_fock, n_fock) = oscillator - epsilon * id - g_z * x;
    h.topRightCorner(n_fock, n_fock) = delta * id + g_x * x;
    h.bottomLeftCorner(n_fock, n_fock) = delta * id + g_x * x;
    return h;
}

double effective_delta(double delta, double g_z, double omega_r) {
    if (!(omega_r > 0.0)) throw std::invalid_argument("effective_delta: omega_r must be > 0");
    const double ratio = g_z / omega_r;
    return delta * std::exp(-2.0 * ratio * ratio);
}

Eigen::VectorXd displaced_state(int n, double g_z, double omega_r, int n_fock) {
    if (!(omega_r > 0.0)) throw std::invalid_argument("displaced_state: omega_r must be > 0");
    if (n < 0 || n >= n_fock) throw std::invalid_argument("displaced_state: need 0 <= n < n_fock");
    const double theta = g_z / omega_r;
    if (n_fock < n + 4.0 * theta * theta + 10.0) {
        throw std::invalid_argument("displaced_state: n_fock below n + 4 (g/omega)^2 + 10");
    }
    const int pad = n_fock + 16 + static_cast<int>(std::ceil(8.0 * theta * theta));
    const Eigen::VectorXd up = displacement_matrix(-theta, n_fock, pad).col(n);
    const Eigen::VectorXd down = displacement_matrix(theta, n_fock, pad).col(n);
    const double deficit = 1.0 - 0.5 * (up.squaredNorm() + down.squaredNorm());
    if (deficit > 1e-8) {
        std::ostringstream msg;
        msg << "displaced_state: truncation loses norm " << deficit << " at n_fock=" << n_fock;
        throw ConvergenceError(msg.str());
    }
    Eigen::VectorXd state(2 * n_fock);
    state.head(n_fock) = up;
    state.tail(n_fock) = down;
    state.normalize();
    return state;
}

}  // namespace fluxnet::pair
