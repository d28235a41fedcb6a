#include "fluxnet/annealing.hpp"
#include "fluxnet/pair_coupling.hpp"
#include "fluxnet/units.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace fluxnet;
using circuit::QubitCircuitParams;
using circuit::TwoLevelParams;
using pair::ResonatorParams;

namespace {

QubitCircuitParams device_params(double f_z = 0.5, double f_alpha = 0.0) {
    QubitCircuitParams p;
    p.alpha = 0.8;
    p.beta = 1.1;
    return p.with_flux(f_z, f_alpha);
}

Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& h) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

TwoLevelParams two_level(double delta, double epsilon) {
    return {delta, epsilon, std::hypot(delta, epsilon)};
}

}  // namespace

TEST(PhaseOperator, SmallCutoffElements) {
    const Eigen::MatrixXcd phi = pair::phase_operator_matrix(1);
    ASSERT_EQ(phi.rows(), 3);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(phi(i, i), std::complex<double>(0.0, 0.0));
    // rows/cols ordered m = -1, 0, 1: element <0|phi|1>
    EXPECT_EQ(phi(1, 2), std::complex<double>(0.0, 1.0));
    EXPECT_THROW(pair::phase_operator_matrix(0), std::invalid_argument);
}

TEST(PhaseOperator, ExactlyHermitian) {
    for (int c : {1, 4, 7, 12}) {
        const Eigen::MatrixXcd phi = pair::phase_operator_matrix(c);
        EXPECT_EQ((phi - phi.adjoint()).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(PhaseOperator, SpectrumApproachesBranch) {
    // The truncated sawtooth approaches +-pi only slowly (gap ~ log(c) / c):
    // about 15% short at cutoff 7 and inside 10% from cutoff 15 on.
    double last_gap = units::kPi;
    for (int c : {7, 10, 15, 20, 30}) {
        const Eigen::VectorXd ev =
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(pair::phase_operator_matrix(c)).eigenvalues();
        EXPECT_GT(ev.minCoeff(), -units::kPi);
        EXPECT_LT(ev.maxCoeff(), units::kPi);
        EXPECT_NEAR(ev.maxCoeff(), -ev.minCoeff(), 1e-12);
        const double gap = units::kPi - ev.maxCoeff();
        EXPECT_LT(gap, last_gap) << "cutoff " << c;
        if (c >= 15) EXPECT_LT(gap, 0.1 * units::kPi) << "cutoff " << c;
        last_gap = gap;
    }
}

TEST(BareCouplings, ZeroResonatorCurrent) {
    const auto s = circuit::solve_spectrum(device_params(0.4997).with_cutoff(4), 2);
    ResonatorParams r;
    r.i_r = 0.0;
    const pair::BareCouplings b = pair::compute_bare_couplings(s, r);
    EXPECT_EQ(b.g_par, 0.0);
    EXPECT_EQ(b.g_perp, 0.0);
}

TEST(BareCouplings, ParallelCouplingVanishesAtDegeneracy) {
    for (double f_alpha : {0.0, 0.1, 0.21}) {
        const auto s = circuit::solve_spectrum(device_params(0.5, f_alpha), 2);
        const pair::BareCouplings b = pair::compute_bare_couplings(s, ResonatorParams{});
        EXPECT_LT(std::abs(b.g_par), 1e-6) << "f_alpha " << f_alpha;
        EXPECT_GT(std::abs(b.g_perp), 1.0);
    }
}

TEST(BareCouplings, BranchShiftLeavesCouplingsUnchanged) {
    // Branch (0, 2 pi] instead of (-pi, pi]: phi + pi on every element. The
    // contraction below is written out independently of beta_phase_element.
    const int c = 5;
    const int n = 2 * c + 1;
    const auto s = circuit::solve_spectrum(device_params(0.4997).with_cutoff(c), 2);
    const Eigen::MatrixXcd shifted =
        pair::phase_operator_matrix(c) + units::kPi * Eigen::MatrixXcd::Identity(n, n);
    auto element = [&](int a, int b) {
        std::complex<double> acc = 0.0;
        for (int outer = 0; outer < n * n; ++outer) {
            for (int m = 0; m < n; ++m) {
                for (int mp = 0; mp < n; ++mp) {
                    acc += std::conj(s.eigenvectors(outer * n + m, a)) * shifted(m, mp) * s.eigenvectors(outer * n + mp, b);
                }
            }
        }
        return acc;
    };
    const ResonatorParams r;
    const double pref = units::current_flux_to_ghz(0.5 * r.i_r, 0.5);
    const double g_par = pref * (element(1, 1) - element(0, 0)).real();
    const double g_perp = pref * 2.0 * element(0, 1).real();
    const pair::BareCouplings b = pair::compute_bare_couplings(s, r);
    EXPECT_NEAR(g_par, b.g_par, 1e-9 * std::abs(b.g_par));
    EXPECT_NEAR(std::abs(g_perp), std::abs(b.g_perp), 1e-9 * std::abs(b.g_perp));
}

TEST(BareCouplings, OrientationPutsRisingStateOnPositiveSigmaZ) {
    const auto s = circuit::solve_spectrum(device_params(0.4997), 2);
    const pair::BareCouplings b = pair::compute_bare_couplings(s, ResonatorParams{});
    EXPECT_LT(b.transition_slope, 0.0);
}

TEST(BareCouplings, CurrentBasisCouplingIsContinuousThroughDegeneracy) {
    // g_z = g_par cos(eta) - g_perp sin(eta) must not jump sign across f_z = 0.5.
    std::vector<double> g_z;
    for (double f : {0.4995, 0.4999, 0.5, 0.5001, 0.5005}) {
        const QubitCircuitParams p = device_params(f);
        const auto tl = circuit::extract_two_level(p);
        const auto c = pair::pair_coupling(circuit::solve_spectrum(p, 2), tl, ResonatorParams{});
        g_z.push_back(c.g_z);
        EXPECT_GT(std::abs(c.g_z), 10.0 * std::abs(c.g_x)) << "f_z " << f;
    }
    for (std::size_t i = 1; i < g_z.size(); ++i) EXPECT_NEAR(g_z[i], g_z[0], 0.05 * std::abs(g_z[0]));
}

TEST(Rotation, LimitingAngles) {
    const auto biased = pair::rotate_couplings(0.3, 0.7, two_level(0.0, -0.2));
    EXPECT_DOUBLE_EQ(biased.g_z, -0.3);
    EXPECT_DOUBLE_EQ(biased.g_x, -0.7);
    const auto symmetric = pair::rotate_couplings(0.3, 0.7, two_level(0.4, 0.0));
    EXPECT_DOUBLE_EQ(symmetric.g_z, -0.7);
    EXPECT_DOUBLE_EQ(symmetric.g_x, 0.3);
    EXPECT_THROW(pair::rotate_couplings(0.3, 0.7, two_level(0.0, 0.0)), std::invalid_argument);
}

TEST(Rotation, PreservesNormAndSpectrum) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const TwoLevelParams tl = two_level(std::abs(u(rng)) + 0.01, u(rng));
        const double g_par = 2.0 * u(rng);
        const double g_perp = 2.0 * u(rng);
        const auto rot = pair::rotate_couplings(g_par, g_perp, tl);
        const double n0 = g_par * g_par + g_perp * g_perp;
        EXPECT_NEAR(rot.g_z * rot.g_z + rot.g_x * rot.g_x, n0, 1e-10 * n0);

        ResonatorParams r;
        r.omega_r = 5.0 + u(rng);
        const int f = 30;
        const auto primed = pair::build_pair_hamiltonian(tl, r, {g_par, g_perp, rot.g_z, rot.g_x}, f);
        const Eigen::MatrixXd current =
            pair::build_current_basis_pair_hamiltonian(tl.epsilon, tl.delta, r.omega_r, rot.g_z, rot.g_x, f);
        EXPECT_LT((eigenvalues(primed.matrix) - eigenvalues(current)).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(PairHamiltonian, DecoupledLadder) {
    const TwoLevelParams tl = two_level(0.3, 0.4);
    ResonatorParams r;
    const auto h = pair::build_pair_hamiltonian(tl, r, {}, 6);
    ASSERT_EQ(h.matrix.rows(), 12);
    EXPECT_EQ((h.matrix - h.matrix.transpose()).cwiseAbs().maxCoeff(), 0.0);
    std::vector<double> expected;
    for (int n = 0; n < 6; ++n) {
        for (double s : {-1.0, 1.0}) expected.push_back(s * tl.omega_q + r.omega_r * (n + 0.5));
    }
    std::sort(expected.begin(), expected.end());
    const Eigen::VectorXd ev = eigenvalues(h.matrix);
    for (int i = 0; i < 12; ++i) EXPECT_NEAR(ev(i), expected[static_cast<std::size_t>(i)], 1e-12);
    EXPECT_THROW(pair::build_pair_hamiltonian(tl, r, {}, 1), std::invalid_argument);
}

TEST(PairHamiltonian, DisplacedOscillatorClosedForm) {
    const TwoLevelParams tl = two_level(0.2, 0.3);
    ResonatorParams r;
    for (double g : {0.5, 3.0, 7.2}) {
        const double ratio = g / r.omega_r;
        const int f = static_cast<int>(std::ceil(8.0 * ratio * ratio)) + 10 + 20;
        const auto h = pair::build_pair_hamiltonian(tl, r, {g, 0.0, 0.0, 0.0}, f);
        const Eigen::VectorXd ev = eigenvalues(h.matrix);
        std::vector<double> expected;
        for (int n = 0; n < 6; ++n) {
            for (double s : {-1.0, 1.0}) expected.push_back(s * tl.omega_q + r.omega_r * (n + 0.5) - g * g / r.omega_r);
        }
        std::sort(expected.begin(), expected.end());
        for (int i = 0; i < 6; ++i) EXPECT_NEAR(ev(i), expected[static_cast<std::size_t>(i)], 1e-8) << "g " << g;
    }
}

TEST(PairHamiltonian, TruncationConvergedAtDefault) {
    const TwoLevelParams tl = two_level(0.0764, -0.285);
    ResonatorParams r;
    const double g_z = -41.25;
    const int f = pair::default_fock_truncation(std::abs(g_z), r.omega_r);
    const Eigen::VectorXd a = eigenvalues(pair::build_current_basis_pair_hamiltonian(tl.epsilon, tl.delta, r.omega_r, g_z, 0.0, f));
    const Eigen::VectorXd b = eigenvalues(pair::build_current_basis_pair_hamiltonian(tl.epsilon, tl.delta, r.omega_r, g_z, 0.0, 2 * f));
    EXPECT_LT((a.head(4) - b.head(4)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(PairHamiltonian, DeviceGroundStatePhotonNumber) {
    // Couplings of the device at f_z = 0.4997: the ground state is a coherent
    // displacement with mean photon number (g_z / omega_r)^2.
    const QubitCircuitParams p = device_params(0.4997);
    const TwoLevelParams tl = circuit::extract_two_level(p);
    const auto c = pair::pair_coupling(circuit::solve_spectrum(p, 2), tl, ResonatorParams{});
    const double omega = 7.2;
    const int f = pair::default_fock_truncation(std::abs(c.g_z), omega) + 40;
    const Eigen::MatrixXd h = pair::build_current_basis_pair_hamiltonian(tl.epsilon, tl.delta, omega, c.g_z, c.g_x, f);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::VectorXd ground = es.eigenvectors().col(0);
    const Eigen::MatrixXd a = pair::annihilation(f);
    const Eigen::MatrixXd number = a.transpose() * a;
    const double photons = ground.head(f).dot(number * ground.head(f)) + ground.tail(f).dot(number * ground.tail(f));
    const double estimate = std::pow(c.g_z / omega, 2);
    EXPECT_GT(photons, 1.0);
    EXPECT_NEAR(photons, estimate, 0.1 * estimate);
}

TEST(EffectiveDelta, ClosedFormValues) {
    EXPECT_EQ(pair::effective_delta(0.3, 0.0, 7.2), 0.3);
    EXPECT_NEAR(pair::effective_delta(1.0, 7.2, 7.2), 0.1353352832366127, 1e-15);
    double last = 1.0;
    for (double g = 0.5; g < 10.0; g += 0.5) {
        const double d = pair::effective_delta(1.0, -g, 7.2);
        EXPECT_LT(d, last);
        last = d;
    }
    EXPECT_THROW(pair::effective_delta(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(EffectiveDelta, MatchesExactPairSplitting) {
    // Oracle: splitting of the two lowest levels of the exact pair with eps = 0.
    const double omega = 7.2;
    const double delta = 0.1;
    for (double ratio : {0.1, 0.25, 0.5, 0.75, 1.0}) {
        const double g = ratio * omega;
        const int f = pair::default_fock_truncation(g, omega) + 30;
        const Eigen::VectorXd ev = eigenvalues(pair::build_current_basis_pair_hamiltonian(0.0, delta, omega, g, 0.0, f));
        const double splitting = 0.5 * (ev(1) - ev(0));
        const double predicted = pair::effective_delta(delta, g, omega);
        EXPECT_NEAR(splitting, predicted, 0.15 * predicted) << "g/omega " << ratio;
    }
}

TEST(DisplacedState, Vacuum) {
    const Eigen::VectorXd s = pair::displaced_state(0, 0.0, 7.2, 12);
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(24);
    expected(0) = expected(12) = std::sqrt(0.5);
    EXPECT_LT((s - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(DisplacedState, PoissonPhotonStatistics) {
    const double g = 9.0;
    const double omega = 7.2;
    const double mean = std::pow(g / omega, 2);
    const int f = 40;
    const Eigen::VectorXd s = pair::displaced_state(0, g, omega, f);
    for (int n = 0; n < 12; ++n) {
        const double p = s(n) * s(n) + s(f + n) * s(f + n);
        const double poisson = std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
        EXPECT_NEAR(p, poisson, 1e-12) << n;
    }
    EXPECT_THROW(pair::displaced_state(0, 30.0, 7.2, 20), std::invalid_argument);
}

TEST(DisplacedState, ApproximatesPairGroundState) {
    // eps = 0 and a stoquastic transverse term -Delta sx: the ground state is
    // the symmetric combination of the two displaced branches.
    const double omega = 7.2;
    for (double ratio : {0.3, 0.7, 1.0}) {
        const double g = ratio * omega;
        const int f = pair::default_fock_truncation(g, omega) + 20;
        const Eigen::MatrixXd h = pair::build_current_basis_pair_hamiltonian(0.0, -0.3, omega, g, 0.0, f);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        const double overlap = es.eigenvectors().col(0).dot(pair::displaced_state(0, g, omega, f));
        EXPECT_GT(overlap * overlap, 0.99) << "g/omega " << ratio;
    }
}

TEST(DeviceCouplings, TransverseTermNegligibleAlongPath) {
    // |g_x| / |g_z| along the annealing path; the excluded neighbourhood of
    // f_z = 0.5 is measured rather than assumed.
    anneal::HardwarePath path;
    path.samples = 6;
    const auto samples = anneal::hardware_schedule(path, anneal::Schedule::linear(100.0));
    double worst = 0.0;
    for (const auto& s : samples) worst = std::max(worst, std::abs(s.g_x(0)) / std::abs(s.g_z(0)));
    RecordProperty("max_gx_over_gz", std::to_string(worst));
    EXPECT_LT(worst, 0.1);
}
