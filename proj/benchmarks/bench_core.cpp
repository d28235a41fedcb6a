#include "fluxnet/annealing.hpp"
#include "fluxnet/circuit_spectrum.hpp"
#include "fluxnet/hamiltonian_verify.hpp"
#include "fluxnet/resonator_network.hpp"

#include <benchmark/benchmark.h>

using namespace fluxnet;

namespace {

network::NetworkConfig chain(int n, double g, double gc) {
    auto net = network::NetworkConfig::uniform(n, 7.2, g);
    for (int i = 0; i + 1 < n; ++i) net.g_c(i, i + 1) = net.g_c(i + 1, i) = gc;
    return net;
}

void BM_SolveSpectrum(benchmark::State& state) {
    circuit::QubitCircuitParams params{5.0, 250.0, 0.8, 1.1, 0.4997, 0.0, static_cast<int>(state.range(0)), false,
                                       circuit::AlphaLoopGauge::kSymmetric};
    for (auto _ : state) benchmark::DoNotOptimize(circuit::solve_spectrum(params, 4));
}
BENCHMARK(BM_SolveSpectrum)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_EffectiveJ(benchmark::State& state) {
    const auto net = chain(static_cast<int>(state.range(0)), 1.0, 0.3);
    for (auto _ : state) benchmark::DoNotOptimize(network::effective_J(net));
}
BENCHMARK(BM_EffectiveJ)->Arg(2)->Arg(8)->Arg(32);

void BM_ZZOracle(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto cfg = verify::FullSystemConfig::frozen_config(chain(n, 1.0, 0.3), Eigen::VectorXd::Constant(n, 0.1), 8);
    verify::ZZOptions options;
    options.converge_fock = false;
    for (auto _ : state) benchmark::DoNotOptimize(verify::zz_splitting_oracle(cfg, options));
}
BENCHMARK(BM_ZZOracle)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_Propagate(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    IsingProblem problem = IsingProblem::zeros(n);
    for (int i = 0; i < n; ++i) problem.eps_tilde(i) = 0.1 * (i % 3 - 1);
    for (int i = 0; i + 1 < n; ++i) problem.j_tilde(i, i + 1) = problem.j_tilde(i + 1, i) = -1.0;
    const Eigen::VectorXd d_scale = Eigen::VectorXd::Ones(n);
    const auto schedule = anneal::Schedule::linear(50.0);
    const anneal::CoefficientFn lam = [&](double t) { return schedule.lambda(t); };
    const anneal::CoefficientFn gam = [&](double t) { return schedule.gamma(t); };
    for (auto _ : state) {
        Eigen::VectorXcd psi = anneal::plus_state(n);
        benchmark::DoNotOptimize(anneal::propagate(problem, lam, gam, 1.0, d_scale, schedule.t_f, 64, psi));
    }
}
BENCHMARK(BM_Propagate)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
