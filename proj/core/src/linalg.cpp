#include "fluxnet/linalg.hpp"

#include "fluxnet/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fluxnet::linalg {

namespace {

template <typename Scalar>
Vector<Scalar> random_unit_vector(Eigen::Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector<Scalar> v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        if constexpr (std::is_same_v<Scalar, cplx>) {
            const double re = normal(rng);
            const double im = normal(rng);
            v(i) = cplx(re, im);
        } else {
            v(i) = normal(rng);
        }
    }
    v.normalize();
    return v;
}

double real_part(double x) { return x; }
double real_part(cplx x) { return x.real(); }

}  // namespace

template <typename Scalar>
EigenPairs<Scalar> lanczos_lowest(Eigen::Index dim, int count, const MatVec<Scalar>& apply,
                                  const LanczosOptions& options) {
    if (count < 1 || count > dim) {
        throw std::invalid_argument("lanczos_lowest: requested eigenpair count outside [1, dim]");
    }
    const Eigen::Index max_krylov = std::min<Eigen::Index>(options.max_iterations, dim);
    std::mt19937_64 rng(options.seed);

    Matrix<Scalar> basis(dim, std::min<Eigen::Index>(max_krylov, 64));
    std::vector<double> alpha;
    std::vector<double> beta;  // beta[j] couples basis j and j + 1
    alpha.reserve(static_cast<std::size_t>(max_krylov));
    beta.reserve(static_cast<std::size_t>(max_krylov));

    basis.col(0) = random_unit_vector<Scalar>(dim, rng);
    Vector<Scalar> w(dim);
    double norm_estimate = 0.0;
    double last_residual = std::numeric_limits<double>::infinity();

    for (Eigen::Index m = 0; m < max_krylov; ++m) {
        apply(basis.col(m), w);
        const double a = real_part(basis.col(m).dot(w));
        alpha.push_back(a);
        w -= a * basis.col(m);
        if (m > 0) w -= beta[static_cast<std::size_t>(m - 1)] * basis.col(m - 1);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for (int pass = 0; pass < 2; ++pass) {
            const Vector<Scalar> overlaps = basis.leftCols(m + 1).adjoint() * w;
            w.noalias() -= basis.leftCols(m + 1) * overlaps;
        }
        double b = w.norm();
        norm_estimate = std::max(norm_estimate, std::abs(a) + b);
        const Eigen::Index krylov = m + 1;
        const bool exhausted = krylov == dim;
        const bool breakdown = b <= 1e-13 * std::max(norm_estimate, 1.0);

        const bool check = krylov >= count &&
                           (krylov % options.check_interval == 0 || exhausted ||
                            krylov == max_krylov || breakdown);
        if (check) {
            Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), krylov);
            Eigen::VectorXd sub(std::max<Eigen::Index>(krylov - 1, 0));
            for (Eigen::Index j = 0; j + 1 < krylov; ++j) sub(j) = beta[static_cast<std::size_t>(j)];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
            tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
            const double tail = (exhausted || breakdown) ? 0.0 : b;
            double estimate = 0.0;
            for (int j = 0; j < count; ++j) {
                estimate = std::max(estimate, tail * std::abs(tri.eigenvectors()(krylov - 1, j)));
            }
            const bool may_stop = exhausted || !breakdown;
            if (estimate < options.tolerance && may_stop) {
                EigenPairs<Scalar> out;
                out.values = tri.eigenvalues().head(count);
                out.vectors = basis.leftCols(krylov) *
                              tri.eigenvectors().leftCols(count).template cast<Scalar>();
                double residual = 0.0;
                Vector<Scalar> hv(dim);
                for (int j = 0; j < count; ++j) {
                    out.vectors.col(j).normalize();
                    apply(out.vectors.col(j), hv);
                    residual = std::max(residual, (hv - out.values(j) * out.vectors.col(j)).norm());
                }
                out.iterations = static_cast<int>(krylov);
                out.max_residual = residual;
                last_residual = residual;
                if (residual < 10.0 * options.tolerance || exhausted) return out;
            } else {
                last_residual = estimate;
            }
        }
        if (exhausted) break;

        if (krylov == basis.cols()) {
            basis.conservativeResize(Eigen::NoChange, std::min<Eigen::Index>(2 * basis.cols(), max_krylov));
        }
        if (krylov >= max_krylov) break;
        if (breakdown) {
            // Invariant subspace found: continue with a fresh direction.
            Vector<Scalar> fresh = random_unit_vector<Scalar>(dim, rng);
            for (int pass = 0; pass < 2; ++pass) {
                const Vector<Scalar> overlaps = basis.leftCols(krylov).adjoint() * fresh;
                fresh.noalias() -= basis.leftCols(krylov) * overlaps;
            }
            fresh.normalize();
            basis.col(krylov) = fresh;
            beta.push_back(0.0);
        } else {
            basis.col(krylov) = w / b;
            beta.push_back(b);
        }
    }
    std::ostringstream msg;
    msg << "lanczos_lowest: no convergence for " << count << " eigenpairs of dimension " << dim
        << " within " << max_krylov << " Krylov vectors (residual " << last_residual
        << ", target " << options.tolerance << ")";
    throw ConvergenceError(msg.str());
}

template <typename Scalar>
EigenPairs<Scalar> dense_lowest(const Matrix<Scalar>& hermitian, int count) {
    if (count < 1 || count > hermitian.rows()) {
        throw std::invalid_argument("dense_lowest: requested eigenpair count outside [1, dim]");
    }
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(hermitian);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("dense_lowest: Hermitian eigensolver failed");
    }
    EigenPairs<Scalar> out;
    out.values = solver.eigenvalues().head(count);
    out.vectors = solver.eigenvectors().leftCols(count);
    out.max_residual =
        (hermitian * out.vectors - out.vectors * out.values.asDiagonal()).colwise().norm().maxCoeff();
    return out;
}

int expv_hermitian(const MatVec<cplx>& apply, double time, Vector<cplx>& psi,
                   const ExpvOptions& options) {
    const Eigen::Index dim = psi.size();
    const int max_krylov = static_cast<int>(std::min<Eigen::Index>(options.krylov_dimension, dim));
    double remaining = time;
    double step = time;
    int substeps = 0;
    Matrix<cplx> basis(dim, max_krylov);
    Vector<cplx> w(dim);

    while (remaining > 0.0) {
        const double h = std::min(step, remaining);
        const double psi_norm = psi.norm();
        if (psi_norm == 0.0) return substeps;
        basis.col(0) = psi / psi_norm;
        std::vector<double> alpha;
        std::vector<double> beta;
        int krylov = 0;
        double tail = 0.0;
        for (int m = 0; m < max_krylov; ++m) {
            apply(basis.col(m), w);
            const double a = basis.col(m).dot(w).real();
            alpha.push_back(a);
            w -= a * basis.col(m);
            if (m > 0) w -= beta.back() * basis.col(m - 1);
            const Vector<cplx> overlaps = basis.leftCols(m + 1).adjoint() * w;
            w.noalias() -= basis.leftCols(m + 1) * overlaps;
            const double b = w.norm();
            krylov = m + 1;
            if (b <= 1e-14 * (std::abs(a) + 1.0)) {
                tail = 0.0;
                break;
            }
            tail = b;
            if (m + 1 < max_krylov) {
                basis.col(m + 1) = w / b;
                beta.push_back(b);
            }
        }
        Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), krylov);
        Eigen::VectorXd sub(std::max(krylov - 1, 0));
        for (int j = 0; j + 1 < krylov; ++j) sub(j) = beta[static_cast<std::size_t>(j)];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        const Eigen::MatrixXd& q = tri.eigenvectors();
        Vector<cplx> phases(krylov);
        for (int j = 0; j < krylov; ++j) {
            phases(j) = std::exp(cplx(0.0, -h * tri.eigenvalues()(j))) * q(0, j);
        }
        const Vector<cplx> coeffs = q.cast<cplx>() * phases;
        const double error = psi_norm * tail * std::abs(coeffs(krylov - 1));
        if (error > options.tolerance && h > 1e-14 * time) {
            step = 0.5 * h;
            continue;
        }
        psi = psi_norm * (basis.leftCols(krylov) * coeffs);
        remaining -= h;
        ++substeps;
    }
    return substeps;
}

template EigenPairs<double> lanczos_lowest<double>(Eigen::Index, int, const MatVec<double>&,
                                                   const LanczosOptions&);
template EigenPairs<cplx> lanczos_lowest<cplx>(Eigen::Index, int, const MatVec<cplx>&,
                                               const LanczosOptions&);
template EigenPairs<double> dense_lowest<double>(const Matrix<double>&, int);
template EigenPairs<cplx> dense_lowest<cplx>(const Matrix<cplx>&, int);

}  // namespace fluxnet::linalg
