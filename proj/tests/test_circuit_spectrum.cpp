#include "fluxnet/circuit_spectrum.hpp"
#include "fluxnet/errors.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

using namespace fluxnet;
using circuit::QubitCircuitParams;

namespace {

// Band-structure parameters of the reference figure: E_c=5, E_J=250, alpha=0.7, beta=4.
QubitCircuitParams band_params(int cutoff = 7) {
    QubitCircuitParams p;
    p.e_c = 5.0;
    p.e_j = 250.0;
    p.alpha = 0.7;
    p.beta = 4.0;
    p.charge_cutoff = cutoff;
    return p;
}

// Device parameters used for couplings and the annealing path.
QubitCircuitParams device_params(int cutoff = 7) {
    QubitCircuitParams p = band_params(cutoff);
    p.alpha = 0.8;
    p.beta = 1.1;
    return p;
}

double relative_gap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return ((a - b).cwiseAbs().array() / b.cwiseAbs().array().max(1.0)).maxCoeff();
}

}  // namespace

TEST(KineticForm, MatchesInverseCapacitanceMatrix) {
    // Oracle: node capacitances C (a), C (b), beta C (beta junction) with the
    // alpha branch alpha C across the series sum, so C_mat = diag(1,1,beta) + alpha 11^T
    // in units of C, and the charging term is 4 E_c n^T C_mat^-1 n.
    for (double alpha : {0.5, 0.7, 0.8}) {
        for (double beta : {1.1, 4.0}) {
            QubitCircuitParams p = band_params();
            p.alpha = alpha;
            p.beta = beta;
            Eigen::Matrix3d c = Eigen::Vector3d(1.0, 1.0, beta).asDiagonal();
            c.array() += alpha;
            const Eigen::Matrix3d expected = 4.0 * p.e_c * c.inverse();
            EXPECT_LT((p.kinetic_form() - expected).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(QubitParams, RejectsInvalidValues) {
    QubitCircuitParams p = band_params();
    p.charge_cutoff = 0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = band_params();
    p.alpha = -0.1;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = band_params();
    p.e_c = 0.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = band_params();
    p.f_z = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(p.validate(), std::invalid_argument);
    EXPECT_NO_THROW(band_params().validate());
}

TEST(QubitHamiltonian, HermitianByConstruction) {
    for (double f_alpha : {0.0, 0.13, 0.21}) {
        QubitCircuitParams p = device_params(3).with_flux(0.4997, f_alpha);
        const Eigen::MatrixXcd h(circuit::build_qubit_hamiltonian(p));
        EXPECT_EQ((h - h.adjoint()).cwiseAbs().maxCoeff(), 0.0);
        EXPECT_EQ(h.rows(), 7 * 7 * 7);
    }
}

TEST(QubitHamiltonian, PureChargingLimit) {
    // E_J = 0: eigenvalues are n^T K n over the integer charges in the box.
    QubitCircuitParams p = band_params(2);
    p.e_j = 0.0;
    const circuit::QubitSpectrum s = circuit::solve_spectrum(p, 4);
    EXPECT_NEAR(s.energies(0), 0.0, 1e-12);

    std::vector<double> levels;
    const Eigen::Matrix3d k = p.kinetic_form();
    for (int a = -2; a <= 2; ++a) {
        for (int b = -2; b <= 2; ++b) {
            for (int c = -2; c <= 2; ++c) {
                const Eigen::Vector3d n(a, b, c);
                levels.push_back(n.dot(k * n));
            }
        }
    }
    std::sort(levels.begin(), levels.end());
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(s.energies(i), levels[static_cast<std::size_t>(i)], 1e-9);
}

TEST(QubitSpectrum, ReflectionSymmetry) {
    for (double f : {0.48, 0.4997, 0.5}) {
        const QubitCircuitParams p = device_params(4).with_flux(f, 0.1);
        const auto a = circuit::solve_spectrum(p, 4);
        const auto b = circuit::solve_spectrum(p.with_flux(1.0 - f, 0.1), 4);
        EXPECT_LT(relative_gap(a.energies, b.energies), 1e-10) << "f_z=" << f;
    }
}

TEST(QubitSpectrum, FluxPeriodicity) {
    const QubitCircuitParams p = device_params(4).with_flux(0.4991, 0.07);
    const auto base = circuit::solve_spectrum(p, 4);
    const auto shift_z = circuit::solve_spectrum(p.with_flux(1.4991, 0.07), 4);
    const auto shift_a = circuit::solve_spectrum(p.with_flux(0.4991, 2.07), 4);
    EXPECT_LT(relative_gap(shift_z.energies, base.energies), 1e-10);
    EXPECT_LT(relative_gap(shift_a.energies, base.energies), 1e-10);
}

TEST(QubitSpectrum, OrthonormalAscendingEigenpairs) {
    const auto s = circuit::solve_spectrum(device_params().with_flux(0.4997, 0.0), 4);
    for (int i = 1; i < 4; ++i) EXPECT_LE(s.energies(i - 1), s.energies(i));
    const Eigen::MatrixXcd gram = s.eigenvectors.adjoint() * s.eigenvectors;
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(std::abs(gram(i, i)), 1.0, 1e-10);
        for (int j = 0; j < 4; ++j) {
            if (i != j) EXPECT_LT(std::abs(gram(i, j)), 1e-8);
        }
    }
}

TEST(QubitSpectrum, SingleStateIsNormalizedGround) {
    const auto s = circuit::solve_spectrum(device_params(3), 1);
    ASSERT_EQ(s.energies.size(), 1);
    EXPECT_NEAR(s.eigenvectors.col(0).norm(), 1.0, 1e-10);
    EXPECT_THROW(circuit::solve_spectrum(device_params(3), 0), std::invalid_argument);
}

TEST(QubitSpectrum, LanczosMatchesDense) {
    circuit::SpectrumOptions dense;
    dense.method = circuit::EigenMethod::kDense;
    circuit::SpectrumOptions krylov;
    krylov.method = circuit::EigenMethod::kLanczos;
    const QubitCircuitParams p = band_params(5).with_flux(0.499, 0.0);
    const auto a = circuit::solve_spectrum(p, 3, dense);
    const auto b = circuit::solve_spectrum(p, 3, krylov);
    EXPECT_LT((a.energies - b.energies).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(QubitSpectrum, GapAtDegeneracyIsTwoDelta) {
    const auto s = circuit::solve_spectrum(band_params(), 3);
    const circuit::TwoLevelParams tl = circuit::extract_two_level(band_params());
    EXPECT_GT(tl.delta, 0.0);
    EXPECT_NEAR(s.energies(1) - s.energies(0), 2.0 * tl.delta, 1e-9);
}

TEST(TwoLevel, DegeneracyPointHasNoBias) {
    const circuit::TwoLevelParams tl = circuit::extract_two_level(device_params());
    EXPECT_EQ(tl.epsilon, 0.0);
    EXPECT_EQ(tl.omega_q, tl.delta);
}

TEST(TwoLevel, OppositeBiasesGiveOppositeEpsilon) {
    const auto lo = circuit::extract_two_level(device_params(5).with_flux(0.4996, 0.0));
    const auto hi = circuit::extract_two_level(device_params(5).with_flux(0.5004, 0.0));
    EXPECT_LT(lo.epsilon, 0.0);
    EXPECT_GT(hi.epsilon, 0.0);
    EXPECT_NEAR(lo.epsilon, -hi.epsilon, 1e-8 * std::abs(hi.epsilon));
    EXPECT_NEAR(hi.omega_q, std::hypot(hi.delta, hi.epsilon), 1e-12 * hi.omega_q);
}

TEST(TwoLevel, RejectsBiasOutsideWindow) {
    EXPECT_THROW(circuit::extract_two_level(device_params(3).with_flux(0.52, 0.0)), std::invalid_argument);
    circuit::TwoLevelOptions wide;
    wide.validity_window = 0.05;
    EXPECT_NO_THROW(circuit::extract_two_level(device_params(3).with_flux(0.52, 0.0), wide));
}

TEST(TwoLevel, ReportsInconsistentHalfGaps) {
    EXPECT_THROW(circuit::two_level_from_half_gaps(0.9, 1.0, 0.499), PhysicsGateError);
    const auto tl = circuit::two_level_from_half_gaps(1.0, 1.0 + 1e-12, 0.499);
    EXPECT_EQ(tl.epsilon, 0.0);
}

TEST(TwoLevel, EpsilonMatchesCurvatureOracle) {
    // In a two-level model the half-gap is h(f) = sqrt(Delta^2 + (s (f - 1/2))^2),
    // so the slope s follows from the curvature at the degeneracy point,
    // s^2 = Delta h''. Oracle: |eps(0.4997)| ~ s * 0.0003.
    const QubitCircuitParams p = band_params();
    auto half_gap = [&](double f) {
        const auto s = circuit::solve_spectrum(p.with_flux(f, 0.0), 2);
        return 0.5 * (s.energies(1) - s.energies(0));
    };
    const double d = 2e-5;
    const double h0 = half_gap(0.5);
    const double curvature = (half_gap(0.5 + d) + half_gap(0.5 - d) - 2.0 * h0) / (d * d);
    const double slope = std::sqrt(h0 * curvature);
    const circuit::TwoLevelParams tl = circuit::extract_two_level(p.with_flux(0.4997, 0.0));
    EXPECT_LT(tl.epsilon, 0.0); // sign(f_z - 0.5)
    EXPECT_NEAR(std::abs(tl.epsilon), slope * 3e-4, 0.05 * slope * 3e-4);
}

TEST(TwoLevel, PersistentCurrentFromEpsilon) {
    circuit::TwoLevelParams tl;
    tl.epsilon = -0.3;
    // I = eps h / (Phi_0 |f - 1/2|)
    const double expected = 0.3e9 * 6.62607015e-34 / (2.067833848e-15 * 3e-4) * 1e9;
    EXPECT_NEAR(circuit::persistent_current_na(tl, 0.4997), expected, 1e-9 * expected);
    EXPECT_THROW(circuit::persistent_current_na(tl, 0.5), std::invalid_argument);
}
