#include "fluxnet/ising.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fluxnet {

void IsingProblem::validate() const {
    const Eigen::Index n = eps_tilde.size();
    if (j_tilde.rows() != n || j_tilde.cols() != n) {
        throw std::invalid_argument("IsingProblem: j_tilde must be n x n with n = len(eps_tilde)");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(std::abs(eps_tilde(i)) <= 1.0)) {
            std::ostringstream msg;
            msg << "IsingProblem: eps_tilde[" << i << "] = " << eps_tilde(i) << " outside [-1, 1]";
            throw std::invalid_argument(msg.str());
        }
        if (j_tilde(i, i) != 0.0) throw std::invalid_argument("IsingProblem: j_tilde diagonal must be zero");
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (!(std::abs(j_tilde(i, j)) <= 1.0)) {
                std::ostringstream msg;
                msg << "IsingProblem: j_tilde[" << i << "][" << j << "] = " << j_tilde(i, j) << " outside [-1, 1]";
                throw std::invalid_argument(msg.str());
            }
            if (j_tilde(i, j) != j_tilde(j, i)) throw std::invalid_argument("IsingProblem: j_tilde must be symmetric");
        }
    }
}

double IsingProblem::energy(std::uint64_t config) const {
    const int n = size();
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        const int si = spin_of(config, i);
        e += eps_tilde(i) * si;
        for (int j = i + 1; j < n; ++j) e += j_tilde(i, j) * si * spin_of(config, j);
    }
    return e;
}

IsingProblem IsingProblem::zeros(int n) {
    if (n < 1) throw std::invalid_argument("IsingProblem::zeros: n must be >= 1");
    return {Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
}

}  // namespace fluxnet
