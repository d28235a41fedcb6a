#pragma once

// Normalized Ising problem: sum_i eps_i s_i + sum_{i<j} J_ij s_i s_j with
// s_i = +-1 and all coefficients in [-1, 1].

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace fluxnet {

struct IsingProblem {
    Eigen::VectorXd eps_tilde; // n
    Eigen::MatrixXd j_tilde;   // n x n, symmetric, zero diagonal

    int size() const { return static_cast<int>(eps_tilde.size()); }

    /// Throws std::invalid_argument on shape, bound, symmetry or diagonal violations.
    void validate() const;

    /// Classical energy of a configuration. Bit i of `config` set means s_i = -1.
    double energy(std::uint64_t config) const;

    static IsingProblem zeros(int n);
};

/// Spin value of bit i: +1 if clear, -1 if set.
inline int spin_of(std::uint64_t config, int i) { return ((config >> i) & 1U) ? -1 : 1; }

}  // namespace fluxnet
