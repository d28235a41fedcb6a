#include "fluxnet/annealing.hpp"
#include "fluxnet/errors.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace fluxnet;
using anneal::Schedule;

namespace {

IsingProblem ferro_pair() {
    IsingProblem p = IsingProblem::zeros(2);
    p.j_tilde(0, 1) = p.j_tilde(1, 0) = -1.0;
    return p;
}

IsingProblem random_problem(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    IsingProblem p = IsingProblem::zeros(n);
    for (int i = 0; i < n; ++i) {
        p.eps_tilde(i) = u(rng);
        for (int j = 0; j < i; ++j) p.j_tilde(i, j) = p.j_tilde(j, i) = u(rng);
    }
    return p;
}

Eigen::VectorXd ones(int n) { return Eigen::VectorXd::Ones(n); }

}  // namespace

TEST(IsingProblem, Validation) {
    IsingProblem p = ferro_pair();
    EXPECT_NO_THROW(p.validate());
    p.j_tilde(0, 1) = -1.5;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = ferro_pair();
    p.j_tilde(0, 1) = 0.5;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = ferro_pair();
    p.eps_tilde(1) = 1.01;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Schedule, BoundaryConditionsExact) {
    for (auto shape : {anneal::Envelope::kLinear, anneal::Envelope::kQuadratic, anneal::Envelope::kSine}) {
        Schedule s = Schedule::linear(37.0);
        s.lambda_shape = shape;
        s.gamma_shape = shape;
        EXPECT_EQ(s.lambda(0.0), 0.0);
        EXPECT_EQ(s.gamma(0.0), 1.0);
        EXPECT_EQ(s.lambda(37.0), 1.0);
        EXPECT_EQ(s.gamma(37.0), 0.0);
        double last = -1.0;
        for (int k = 0; k <= 20; ++k) {
            const double v = s.lambda(37.0 * k / 20.0);
            EXPECT_GE(v, last);
            last = v;
        }
    }
}

TEST(QaHamiltonian, TransverseOnly) {
    const IsingProblem p = random_problem(3, 4);
    const Eigen::Vector3d d(0.5, 1.0, 2.0);
    const Eigen::MatrixXd h = anneal::build_qa_hamiltonian(p, 0.0, 1.0, 1.0, d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    std::vector<double> expected;
    for (int mask = 0; mask < 8; ++mask) {
        double e = 0.0;
        for (int i = 0; i < 3; ++i) e += ((mask >> i) & 1 ? 1.0 : -1.0) * d(i);
        expected.push_back(e);
    }
    std::sort(expected.begin(), expected.end());
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(es.eigenvalues()(i), expected[static_cast<std::size_t>(i)], 1e-12);
    const Eigen::VectorXd plus = anneal::plus_state(3).real();
    EXPECT_NEAR(std::abs(es.eigenvectors().col(0).dot(plus)), 1.0, 1e-12);
}

TEST(QaHamiltonian, ProblemOnlyIsDiagonalIsingEnergy) {
    const IsingProblem p = random_problem(4, 9);
    const Eigen::MatrixXd h = anneal::build_qa_hamiltonian(p, 1.0, 0.0, 2.5, ones(4));
    Eigen::MatrixXd off = h;
    off.diagonal().setZero();
    EXPECT_EQ(off.cwiseAbs().maxCoeff(), 0.0);
    for (std::uint64_t c = 0; c < 16; ++c) EXPECT_NEAR(h(c, c), 2.5 * p.energy(c), 1e-14);
}

TEST(QaHamiltonian, FerromagneticPairHandSpectrum) {
    // -a ZZ - b (X1 + X2), a = b = 1/2: {-sqrt(a^2 + 4 b^2), -a, a, sqrt(a^2 + 4 b^2)}.
    const Eigen::MatrixXd h = anneal::build_qa_hamiltonian(ferro_pair(), 0.5, 0.5, 1.0, ones(2));
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues();
    const double r = std::sqrt(0.25 + 1.0);
    EXPECT_NEAR(ev(0), -r, 1e-14);
    EXPECT_NEAR(ev(1), -0.5, 1e-14);
    EXPECT_NEAR(ev(2), 0.5, 1e-14);
    EXPECT_NEAR(ev(3), r, 1e-14);
}

TEST(QaHamiltonian, StoquasticAndBounded) {
    const Eigen::MatrixXd h = anneal::build_qa_hamiltonian(random_problem(5, 2), 0.3, 0.7, 1.0, ones(5));
    Eigen::MatrixXd off = h;
    off.diagonal().setZero();
    EXPECT_LE(off.maxCoeff(), 0.0);
    EXPECT_THROW(anneal::build_qa_hamiltonian(random_problem(13, 1), 0.5, 0.5, 1.0, ones(13)), BudgetError);
    EXPECT_THROW(anneal::build_qa_hamiltonian(ferro_pair(), 1.2, 0.5, 1.0, ones(2)), std::invalid_argument);
}

TEST(BruteForce, Examples) {
    auto ferro = anneal::brute_force_ground_state(ferro_pair());
    EXPECT_EQ(ferro.energy, -1.0);
    std::sort(ferro.configurations.begin(), ferro.configurations.end());
    EXPECT_EQ(ferro.configurations, (std::vector<std::uint64_t>{0b00, 0b11}));

    IsingProblem anti = ferro_pair();
    anti.j_tilde *= -1.0;
    auto a = anneal::brute_force_ground_state(anti);
    std::sort(a.configurations.begin(), a.configurations.end());
    EXPECT_EQ(a.configurations, (std::vector<std::uint64_t>{0b01, 0b10}));

    IsingProblem tri = IsingProblem::zeros(3);
    tri.j_tilde.setOnes();
    tri.j_tilde.diagonal().setZero();
    const auto t = anneal::brute_force_ground_state(tri);
    EXPECT_EQ(t.energy, -1.0);
    EXPECT_EQ(t.configurations.size(), 6U);

    EXPECT_THROW(anneal::brute_force_ground_state(IsingProblem::zeros(21)), std::invalid_argument);
}

TEST(BruteForce, AgreesWithDiagonalGroundSpace) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const IsingProblem p = random_problem(6, seed);
        const Eigen::MatrixXd h = anneal::build_qa_hamiltonian(p, 1.0, 0.0, 1.0, ones(6));
        const double lowest = h.diagonal().minCoeff();
        std::vector<std::uint64_t> argmin;
        for (Eigen::Index c = 0; c < h.rows(); ++c) {
            if (h(c, c) == lowest) argmin.push_back(static_cast<std::uint64_t>(c));
        }
        auto truth = anneal::brute_force_ground_state(p);
        std::sort(truth.configurations.begin(), truth.configurations.end());
        EXPECT_EQ(truth.configurations, argmin);
        EXPECT_EQ(truth.energy, lowest);
    }
}

TEST(Evolution, FrozenHamiltonianKeepsPopulations) {
    const IsingProblem p = random_problem(3, 17);
    const double lam = 0.4;
    const double gam = 0.6;
    const Eigen::MatrixXd h = anneal::build_qa_hamiltonian(p, lam, gam, 1.0, ones(3));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    Eigen::VectorXcd psi(8);
    for (auto& v : psi) v = {n01(rng), n01(rng)};
    psi.normalize();
    const Eigen::VectorXd before = (es.eigenvectors().transpose() * psi).cwiseAbs2();
    const double drift = anneal::propagate(p, [&](double) { return lam; }, [&](double) { return gam; }, 1.0, ones(3),
                                           57.0, 40, psi);
    const Eigen::VectorXd after = (es.eigenvectors().transpose() * psi).cwiseAbs2();
    EXPECT_LT((before - after).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(drift, 1e-10);
}

TEST(Evolution, AdiabaticFerromagneticPair) {
    const auto slow = anneal::evolve_state(ferro_pair(), Schedule::linear(200.0), 1.0, ones(2));
    EXPECT_GT(slow.success_probability, 0.99);
    EXPECT_LT(slow.max_norm_error, 1e-10);
    EXPECT_LT(slow.fidelity_change, 1e-8);
    const auto fast = anneal::evolve_state(ferro_pair(), Schedule::linear(2.0), 1.0, ones(2));
    EXPECT_LT(fast.success_probability, slow.success_probability);
    EXPECT_NEAR(fast.final_state.norm(), 1.0, 1e-10);
}

TEST(Evolution, SuccessSumsDegenerateGroundSet) {
    const auto r = anneal::evolve_state(ferro_pair(), Schedule::linear(200.0), 1.0, ones(2));
    ASSERT_EQ(r.ground_truth.configurations.size(), 2U);
    const double summed = std::norm(r.final_state(0)) + std::norm(r.final_state(3));
    EXPECT_NEAR(r.success_probability, summed, 1e-14);
    // Both ferromagnetic states are equally likely by symmetry.
    EXPECT_EQ(r.decoded.size(), 2U);
}

TEST(Evolution, SuccessGrowsWithDuration) {
    for (std::uint64_t seed : {21U, 22U, 23U}) {
        const IsingProblem p = random_problem(4, seed);
        double last = 0.0;
        for (double t_f : {25.0, 50.0, 100.0, 200.0, 400.0}) {
            const double prob = anneal::evolve_state(p, Schedule::linear(t_f), 1.0, ones(4)).success_probability;
            EXPECT_GE(prob, last - 1e-6) << "seed " << seed << " t_f " << t_f;
            last = prob;
        }
    }
}

TEST(Evolution, RejectsOversizedProblems) {
    EXPECT_THROW(anneal::evolve_state(IsingProblem::zeros(15), Schedule::linear(1.0), 1.0, ones(15)), BudgetError);
}

TEST(Thermal, Scale) {
    EXPECT_NEAR(anneal::thermal_scale(10.0), 0.2084, 1e-4);
    EXPECT_DOUBLE_EQ(anneal::thermal_scale(20.0), 2.0 * anneal::thermal_scale(10.0));
    EXPECT_THROW(anneal::thermal_scale(0.0), std::invalid_argument);
}

TEST(Thermal, MarginReport) {
    Eigen::Matrix2d weak;
    weak << 0.0, 8e-5, 8e-5, 0.0;
    EXPECT_TRUE(anneal::margin_report(Eigen::Vector2d(1.0, 1.0), weak, 10.0).any_flagged);
    Eigen::Matrix2d strong;
    strong << 0.0, 1.0, 1.0, 0.0;
    EXPECT_FALSE(anneal::margin_report(Eigen::Vector2d(1.0, -1.0), strong, 10.0).any_flagged);
    EXPECT_FALSE(anneal::margin_report(Eigen::Vector2d(1.0, 1.0), weak, 1e-6).any_flagged);
}

TEST(HardwarePath, EndpointsAndTrends) {
    anneal::HardwarePath path;
    path.samples = 5;
    const auto s = anneal::hardware_schedule(path, Schedule::linear(100.0));
    ASSERT_EQ(s.size(), 5U);
    EXPECT_EQ(s.front().g_c, 0.0);
    EXPECT_EQ(s.front().j_z.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(s.front().j_x.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(s.front().epsilon.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(s.back().f_z, 0.4997);
    EXPECT_EQ(s.back().f_alpha, 0.0);
    EXPECT_NEAR(s.back().g_c, 0.4, 1e-15);
    for (std::size_t k = 1; k < s.size(); ++k) {
        EXPECT_GT(std::abs(s[k].j_z(0, 1)), std::abs(s[k - 1].j_z(0, 1)));
        EXPECT_LT(s[k].delta(0), s[k - 1].delta(0));
        EXPECT_LE(s[k].delta_eff(0), s[k].delta(0));
    }
    const auto gate = anneal::endpoint_gate(s.back(), 10.0);
    EXPECT_TRUE(gate.passed) << gate.detail;
    EXPECT_LT(gate.ratio, 0.01);
}
