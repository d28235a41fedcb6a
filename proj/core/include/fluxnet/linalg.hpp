#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>

namespace fluxnet::linalg {

using cplx = std::complex<double>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// y = H x for a Hermitian operator H. `y` arrives sized and must be overwritten.
template <typename Scalar>
using MatVec = std::function<void(const Vector<Scalar>& x, Vector<Scalar>& y)>;

template <typename Scalar>
struct EigenPairs {
    Eigen::VectorXd values;    // ascending
    Matrix<Scalar> vectors;    // columns, unit norm
    int iterations = 0;        // Krylov dimension reached (0 for dense)
    double max_residual = 0.0; // max_j |H v_j - lambda_j v_j|
};

struct LanczosOptions {
    /// Absolute residual target |H v - lambda v| for every requested pair.
    double tolerance = 1e-9;
    int max_iterations = 2500;
    int check_interval = 10;
    std::uint64_t seed = 0x5eedf1a5ULL;
};

/// Lowest `count` eigenpairs of a Hermitian operator of dimension `dim` by
/// Lanczos iteration with full reorthogonalization. The start vector is drawn
/// from a fixed-seed generator, so results are reproducible bit for bit.
/// Throws ConvergenceError with the reached residual when the Krylov budget
/// runs out.
template <typename Scalar>
EigenPairs<Scalar> lanczos_lowest(Eigen::Index dim, int count, const MatVec<Scalar>& apply,
                                  const LanczosOptions& options = {});

/// Lowest `count` eigenpairs of a dense Hermitian matrix (reference path).
template <typename Scalar>
EigenPairs<Scalar> dense_lowest(const Matrix<Scalar>& hermitian, int count);

struct ExpvOptions {
    int krylov_dimension = 30;
    /// Local error target per call, in 2-norm of the propagated vector.
    double tolerance = 1e-12;
};

/// psi <- exp(-i H t) psi for Hermitian H, by Krylov projection with adaptive
/// substeps. Returns the number of substeps used.
int expv_hermitian(const MatVec<cplx>& apply, double time, Vector<cplx>& psi,
                   const ExpvOptions& options = {});

/// max_ij |A_ij - conj(B_ji)|.
template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace fluxnet::linalg
