#include "fluxnet/circuit_spectrum.hpp"

#include "fluxnet/errors.hpp"
#include "fluxnet/units.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fluxnet::circuit {

using units::kPi;

void QubitCircuitParams::validate() const {
    if (!(e_c > 0.0)) throw std::invalid_argument("QubitCircuitParams: e_c must be > 0");
    if (!(e_j >= 0.0)) throw std::invalid_argument("QubitCircuitParams: e_j must be >= 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("QubitCircuitParams: alpha must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("QubitCircuitParams: beta must be > 0");
    if (charge_cutoff < 1) throw std::invalid_argument("QubitCircuitParams: charge_cutoff must be >= 1");
    if (!std::isfinite(f_z) || !std::isfinite(f_alpha)) {
        throw std::invalid_argument("QubitCircuitParams: flux biases must be finite");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> form(kinetic_form(), Eigen::EigenvaluesOnly);
    if (!(form.eigenvalues().minCoeff() > 0.0)) {
        throw std::invalid_argument("QubitCircuitParams: kinetic quadratic form is not positive definite");
    }
}

Eigen::Index QubitCircuitParams::dimension() const {
    const Eigen::Index n = axis_size();
    return n * n * n;
}

Eigen::Matrix3d QubitCircuitParams::kinetic_form() const {
    // Inverse capacitance matrix of junctions C, C, beta*C with the alpha
    // branch (alpha*C) across all three; q = 2e n and E_c = e^2 / 2C.
    const double det = alpha + beta + 2.0 * alpha * beta;
    const double ab = alpha + beta + alpha * beta;
    const double scale = 4.0 * e_c / det;
    Eigen::Matrix3d k;
    k << ab, -alpha * beta, -alpha,
        -alpha * beta, ab, -alpha,
        -alpha, -alpha, 1.0 + 2.0 * alpha;
    return scale * k;
}

double QubitCircuitParams::alpha_branch_phase() const {
    switch (gauge) {
        case AlphaLoopGauge::kSymmetric:
            return 2.0 * kPi * f_z;
        case AlphaLoopGauge::kLiteral:
            return kPi * (2.0 * f_z - f_alpha);
    }
    return 0.0;
}

QubitCircuitParams QubitCircuitParams::with_flux(double f_z_new, double f_alpha_new) const {
    QubitCircuitParams p = *this;
    p.f_z = f_z_new;
    p.f_alpha = f_alpha_new;
    return p;
}

QubitCircuitParams QubitCircuitParams::with_cutoff(int cutoff) const {
    QubitCircuitParams p = *this;
    p.charge_cutoff = cutoff;
    return p;
}

Eigen::Index charge_index(int cutoff, int k, int l, int m) {
    const Eigen::Index n = 2 * cutoff + 1;
    return ((static_cast<Eigen::Index>(k + cutoff) * n) + (l + cutoff)) * n + (m + cutoff);
}

SparseHamiltonian build_qubit_hamiltonian(const QubitCircuitParams& params) {
    params.validate();
    const int c = params.charge_cutoff;
    const Eigen::Index dim = params.dimension();
    const Eigen::Matrix3d kin = params.kinetic_form();
    const double hop = -0.5 * params.e_j;
    const double beta_weight = params.unit_beta_cosine ? 1.0 : params.beta;
    const cplx branch_hop = -0.5 * params.e_j * params.alpha * std::cos(kPi * params.f_alpha) *
                            std::exp(cplx(0.0, params.alpha_branch_phase()));

    std::vector<Eigen::Triplet<cplx>> triplets;
    triplets.reserve(static_cast<std::size_t>(dim) * 9);
    for (int k = -c; k <= c; ++k) {
        for (int l = -c; l <= c; ++l) {
            for (int m = -c; m <= c; ++m) {
                const Eigen::Index row = charge_index(c, k, l, m);
                const Eigen::Vector3d n(k, l, m);
                triplets.emplace_back(row, row, n.dot(kin * n));
                // Each pair is emitted from both ends with conjugate amplitudes,
                // so the assembled matrix is exactly Hermitian.
                if (k + 1 <= c) triplets.emplace_back(charge_index(c, k + 1, l, m), row, hop);
                if (k - 1 >= -c) triplets.emplace_back(charge_index(c, k - 1, l, m), row, hop);
                if (l + 1 <= c) triplets.emplace_back(charge_index(c, k, l + 1, m), row, hop);
                if (l - 1 >= -c) triplets.emplace_back(charge_index(c, k, l - 1, m), row, hop);
                if (m + 1 <= c) triplets.emplace_back(charge_index(c, k, l, m + 1), row, hop * beta_weight);
                if (m - 1 >= -c) triplets.emplace_back(charge_index(c, k, l, m - 1), row, hop * beta_weight);
                if (k + 1 <= c && l + 1 <= c && m + 1 <= c) {
                    triplets.emplace_back(charge_index(c, k + 1, l + 1, m + 1), row, branch_hop);
                }
                if (k - 1 >= -c && l - 1 >= -c && m - 1 >= -c) {
                    triplets.emplace_back(charge_index(c, k - 1, l - 1, m - 1), row, std::conj(branch_hop));
                }
            }
        }
    }
    SparseHamiltonian h(dim, dim);
    h.setFromTriplets(triplets.begin(), triplets.end());
    return h;
}

SparseHamiltonian build_flux_derivative(const QubitCircuitParams& params) {
    params.validate();
    const int c = params.charge_cutoff;
    const Eigen::Index dim = params.dimension();
    // d/df_z of -E_J alpha cos(pi f_alpha) cos(sum phi + phase), with
    // d(phase)/df_z = 2 pi in both gauges; sin x = (e^{ix} - e^{-ix}) / 2i.
    const cplx up = params.e_j * params.alpha * std::cos(kPi * params.f_alpha) * 2.0 * kPi *
                    std::exp(cplx(0.0, params.alpha_branch_phase())) / cplx(0.0, 2.0);
    std::vector<Eigen::Triplet<cplx>> triplets;
    triplets.reserve(static_cast<std::size_t>(dim) * 2);
    for (int k = -c; k < c; ++k) {
        for (int l = -c; l < c; ++l) {
            for (int m = -c; m < c; ++m) {
                const Eigen::Index lo = charge_index(c, k, l, m);
                const Eigen::Index hi = charge_index(c, k + 1, l + 1, m + 1);
                triplets.emplace_back(hi, lo, up);
                triplets.emplace_back(lo, hi, std::conj(up));
            }
        }
    }
    SparseHamiltonian d(dim, dim);
    d.setFromTriplets(triplets.begin(), triplets.end());
    return d;
}

namespace {

void fix_phase_gauge(Eigen::MatrixXcd& vectors) {
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        auto v = vectors.col(j);
        // conj(v reversed) = exp(i chi) v with exp(i chi) = conj(sum v_i v_{P i}).
        const cplx overlap = (v.array() * v.reverse().array()).sum();
        if (std::abs(overlap) > 0.5) {
            v *= std::exp(cplx(0.0, -0.5 * std::arg(overlap)));
        }
        Eigen::Index best = 0;
        v.cwiseAbs2().maxCoeff(&best);
        const cplx pivot = v(best);
        const double tiny = 1e-9 * std::abs(pivot);
        const bool flip = pivot.real() < -tiny || (std::abs(pivot.real()) <= tiny && pivot.imag() < 0.0);
        if (flip) v = -v;
    }
}

}  // namespace

QubitSpectrum solve_spectrum(const QubitCircuitParams& params, int count,
                             const SpectrumOptions& options) {
    const SparseHamiltonian h = build_qubit_hamiltonian(params);
    const Eigen::Index dim = h.rows();
    if (count < 1 || count > dim) {
        throw std::invalid_argument("solve_spectrum: count must lie in [1, basis dimension]");
    }
    bool dense = options.method == EigenMethod::kDense;
    if (options.method == EigenMethod::kAuto) dense = dim <= options.dense_limit;

    linalg::EigenPairs<cplx> pairs;
    if (dense) {
        pairs = linalg::dense_lowest<cplx>(Eigen::MatrixXcd(h), count);
    } else {
        linalg::MatVec<cplx> apply = [&h](const linalg::Vector<cplx>& x, linalg::Vector<cplx>& y) {
            y.noalias() = h * x;
        };
        pairs = linalg::lanczos_lowest<cplx>(dim, count, apply, options.lanczos);
    }

    QubitSpectrum out;
    out.energies = pairs.values;
    out.eigenvectors = std::move(pairs.vectors);
    out.params = params;
    out.max_residual = pairs.max_residual;
    fix_phase_gauge(out.eigenvectors);

    // Rayleigh quotients must come out real.
    for (Eigen::Index j = 0; j < out.eigenvectors.cols(); ++j) {
        const Eigen::VectorXcd v = out.eigenvectors.col(j);
        const cplx rq = v.dot(h * v);
        if (std::abs(rq.imag()) > 1e-12 * std::max(1.0, std::abs(rq.real()))) {
            std::ostringstream msg;
            msg << "solve_spectrum: eigenpair " << j << " has imaginary energy residue " << rq.imag();
            throw ConvergenceError(msg.str());
        }
    }
    return out;
}

TwoLevelParams two_level_from_half_gaps(double half_gap_at_bias, double half_gap_at_symmetry,
                                        double f_z, double consistency_tolerance) {
    TwoLevelParams tl;
    tl.delta = half_gap_at_symmetry;
    const double excess = half_gap_at_bias * half_gap_at_bias - tl.delta * tl.delta;
    if (excess < -consistency_tolerance * tl.delta * tl.delta) {
        std::ostringstream msg;
        msg << "two-level reduction inconsistent: half-gap " << half_gap_at_bias
            << " GHz at f_z=" << f_z << " is below delta " << tl.delta << " GHz";
        throw PhysicsGateError(msg.str());
    }
    const double magnitude = std::sqrt(std::max(excess, 0.0));
    const double side = f_z - 0.5;
    tl.epsilon = side > 0.0 ? magnitude : (side < 0.0 ? -magnitude : 0.0);
    tl.omega_q = std::hypot(tl.delta, tl.epsilon);
    return tl;
}

TwoLevelParams extract_two_level(const QubitCircuitParams& params, const TwoLevelOptions& options) {
    if (std::abs(params.f_z - 0.5) > options.validity_window) {
        std::ostringstream msg;
        msg << "extract_two_level: f_z=" << params.f_z << " outside the two-level window 0.5 +- "
            << options.validity_window;
        throw std::invalid_argument(msg.str());
    }
    const QubitSpectrum symmetric = solve_spectrum(params.with_flux(0.5, params.f_alpha), 2, options.spectrum);
    const double half_gap_sym = 0.5 * (symmetric.energies(1) - symmetric.energies(0));
    if (params.f_z == 0.5) {
        return two_level_from_half_gaps(half_gap_sym, half_gap_sym, 0.5, options.consistency_tolerance);
    }
    const QubitSpectrum biased = solve_spectrum(params, 2, options.spectrum);
    const double half_gap = 0.5 * (biased.energies(1) - biased.energies(0));
    return two_level_from_half_gaps(half_gap, half_gap_sym, params.f_z, options.consistency_tolerance);
}

double persistent_current_na(const TwoLevelParams& two_level, double f_z) {
    const double offset = f_z - 0.5;
    if (offset == 0.0) throw std::invalid_argument("persistent_current_na: needs f_z != 0.5");
    // epsilon = I_p * Phi_0 * (f_z - 0.5)
    const double joules = units::ghz_to_joules(std::abs(two_level.epsilon));
    return joules / (units::kFluxQuantum * std::abs(offset)) / units::kNano;
}

}  // namespace fluxnet::circuit
