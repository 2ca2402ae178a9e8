#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "poweratom/density_matrix.hpp"

namespace poweratom {

using Rng = std::mt19937_64;

inline Eigen::MatrixXd random_gaussian(Rng& rng, Eigen::Index rows,
                                       Eigen::Index cols) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::MatrixXd M(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = nd(rng);
    return M;
}

// Haar-ish random orthogonal matrix: QR of a Gaussian matrix with the
// sign convention diag(R) > 0.
inline Eigen::MatrixXd random_orthogonal(Rng& rng, Eigen::Index n) {
    Eigen::MatrixXd A = random_gaussian(rng, n, n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i)
        if (R(i, i) < 0.0) Q.col(i) = -Q.col(i);
    return Q;
}

// Random PSD contraction built spectrally (uniform eigenvalues in
// [lo, hi] subset of [0, 1], random orthogonal basis), so 0 <= G <= 1
// holds exactly by construction.
inline Eigen::MatrixXd random_psd_contraction(Rng& rng, Eigen::Index n,
                                              double lo = 0.0,
                                              double hi = 1.0) {
    std::uniform_real_distribution<double> ud(lo, hi);
    Eigen::VectorXd lam(n);
    for (Eigen::Index i = 0; i < n; ++i) lam[i] = ud(rng);
    Eigen::MatrixXd U = random_orthogonal(rng, n);
    return U * lam.asDiagonal() * U.transpose();
}

inline Eigen::MatrixXd random_symmetric(Rng& rng, Eigen::Index n) {
    Eigen::MatrixXd A = random_gaussian(rng, n, n);
    return 0.5 * (A + A.transpose()).eval();
}

// Random feasible state with eigenvalues kept away from the endpoints
// (where lambda^p loses differentiability); occupation is concentrated
// on the first `rank` basis vectors of each block.
inline DensityMatrixState random_feasible_state(Rng& rng, GridPtr grid,
                                                int L_max, int rank,
                                                double lo = 0.1,
                                                double hi = 0.9) {
    DensityMatrixState st = zero_state(std::move(grid), L_max);
    const Eigen::Index n = st.grid->size();
    std::uniform_real_distribution<double> ud(lo, hi);
    for (auto& b : st.blocks) {
        Eigen::MatrixXd V = random_gaussian(rng, n, rank);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
        Eigen::MatrixXd Q =
            qr.householderQ() * Eigen::MatrixXd::Identity(n, rank);
        Eigen::VectorXd lam(rank);
        for (int i = 0; i < rank; ++i) lam[i] = ud(rng);
        b.G = Q * lam.asDiagonal() * Q.transpose();
    }
    return st;
}

}  // namespace poweratom
