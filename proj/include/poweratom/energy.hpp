#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "poweratom/density_matrix.hpp"
#include "poweratom/errors.hpp"
#include "poweratom/grid.hpp"
#include "poweratom/multipole.hpp"

namespace poweratom {

struct EnergyBreakdown {
    double kinetic = 0.0;     // T >= 0
    double attraction = 0.0;  // V <= 0
    double hartree = 0.0;     // D >= 0
    double exchange = 0.0;    // X >= 0
    double total = 0.0;       // T + V + D - X, exactly as stored

    static EnergyBreakdown make(double T, double V, double D, double X) {
        return {T, V, D, X, T + V + D - X};
    }
};

// Hartree potential of a shell density at the grid nodes:
// phi(r_i) = sum_j w_j u_j / max(r_i, r_j), via prefix sums.
inline Eigen::VectorXd hartree_potential(const RadialDensity& d) {
    const auto& g = *d.grid;
    const Eigen::Index n = g.size();
    Eigen::VectorXd phi(n);
    // enclosed(i) = sum_{j<=i} w u ; outer(i) = sum_{j>i} w u / r_j
    double enclosed = 0.0;
    std::vector<double> enc(n), outer(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        enclosed += g.w[i] * d.u[i];
        enc[i] = enclosed;
    }
    double out = 0.0;
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        outer[i] = out;
        out += g.w[i] * d.u[i] / g.r[i];
    }
    for (Eigen::Index i = 0; i < n; ++i) phi[i] = enc[i] / g.r[i] + outer[i];
    return phi;
}

inline double hartree_energy(const RadialDensity& d) {
    const auto& g = *d.grid;
    Eigen::VectorXd phi = hartree_potential(d);
    double D = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i)
        D += g.w[i] * d.u[i] * phi[i];
    return 0.5 * D;
}

// Everything fixed by (grid, L_max, Z, p): channel kinetic operators,
// raw multipole kernels and the angular table. States evaluated against
// a model must live on the same grid.
class EnergyModel {
   public:
    EnergyModel(GridPtr grid, int L_max, double Z, double p)
        : grid_(std::move(grid)), Z_(Z), p_(p), table_(L_max) {
        if (!(Z >= 0.0)) throw ParameterError("EnergyModel: need Z >= 0");
        if (!(p >= 0.5 && p <= 1.0))
            throw ParameterError("EnergyModel: need p in [1/2, 1]");
        for (int l = 0; l <= L_max; ++l)
            kinetic_.push_back(channel_kinetic(*grid_, l).H);
        for (int k = 0; k <= table_.k_max(); ++k)
            kernels_.push_back(multipole_kernel_raw(*grid_, k));
    }

    const RadialGrid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    int L_max() const { return table_.L_max(); }
    double Z() const { return Z_; }
    double p() const { return p_; }
    const MultipoleTable& table() const { return table_; }
    const Eigen::MatrixXd& kinetic_operator(int l) const { return kinetic_[l]; }
    const Eigen::MatrixXd& raw_kernel(int k) const { return kernels_[k]; }

    void check_state(const DensityMatrixState& st) const {
        if (st.grid.get() != grid_.get() &&
            (st.grid->n != grid_->n || st.grid->r != grid_->r))
            throw ParameterError("state grid does not match model grid");
        if (st.L_max() > L_max())
            throw ParameterError("state L_max exceeds model table");
    }

    double kinetic_energy(const DensityMatrixState& st) const {
        check_state(st);
        double T = 0.0;
        for (const auto& b : st.blocks)
            T += b.degeneracy() *
                 kinetic_[b.ell].cwiseProduct(b.G).sum();
        return T;
    }

    double attraction_energy(const DensityMatrixState& st) const {
        check_state(st);
        double a = 0.0;
        for (const auto& b : st.blocks) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < b.G.rows(); ++i)
                s += b.G(i, i) / grid_->r[i];
            a += b.degeneracy() * s;
        }
        return -Z_ * a;
    }

    // Fractional powers of all blocks (clamped spectrum); reuses the
    // eigensystems when the caller already has them.
    std::vector<Eigen::MatrixXd> block_powers(
        const DensityMatrixState& st,
        const std::vector<BlockEigen>* eigs = nullptr) const {
        std::vector<Eigen::MatrixXd> F;
        F.reserve(st.blocks.size());
        for (std::size_t b = 0; b < st.blocks.size(); ++b) {
            BlockEigen e = eigs ? (*eigs)[b] : eigen_decompose(st.blocks[b].G);
            Eigen::VectorXd lp = e.lambda;
            for (Eigen::Index i = 0; i < lp.size(); ++i) {
                double l = std::clamp(lp[i], 0.0, 1.0);
                if (l < kSpectralZero) l = 0.0;
                lp[i] = std::pow(l, p_);
            }
            F.push_back(assemble(e, lp));
        }
        return F;
    }

    // X = 1/2 sum_{l l' k} A_{l l' k} sum_{ij} (F_l)_ij (F_l')_ij m_k(r_i,r_j)
    // with F = G^p in the weighted representation (which absorbs dr ds).
    double exchange_from_powers(const std::vector<Eigen::MatrixXd>& F) const {
        if (static_cast<int>(F.size()) - 1 > L_max())
            throw ParameterError("exchange: state L_max exceeds table");
        double X = 0.0;
        for (std::size_t l = 0; l < F.size(); ++l)
            for (std::size_t lp = 0; lp < F.size(); ++lp)
                for (int k = 0; k <= table_.k_max(); ++k) {
                    const double A = table_.A(static_cast<int>(l),
                                              static_cast<int>(lp), k);
                    if (A == 0.0) continue;
                    X += A *
                         F[l].cwiseProduct(F[lp]).cwiseProduct(kernels_[k])
                             .sum();
                }
        return 0.5 * X;
    }

    double exchange_energy(const DensityMatrixState& st) const {
        check_state(st);
        return exchange_from_powers(block_powers(st));
    }

    EnergyBreakdown total_energy(
        const DensityMatrixState& st,
        const std::vector<BlockEigen>* eigs = nullptr) const {
        check_state(st);
        const double T = kinetic_energy(st);
        const double V = attraction_energy(st);
        const double D = hartree_energy(density(st));
        const double X = exchange_from_powers(block_powers(st, eigs));
        EnergyBreakdown e = EnergyBreakdown::make(T, V, D, X);
        if (!std::isfinite(e.total))
            throw NumericError("total_energy: non-finite energy");
        return e;
    }

    // Gradient of E with respect to the blocks under the plain
    // (unweighted) Frobenius pairing: dE = sum_l tr(grad_l dG_l). The
    // exchange part pulls W_l = sum_{l' k} A_{l l' k} m_k o F_l' back
    // through A -> A^p with Daleckii-Krein divided differences
    //   f[a, b] = (a^p - b^p) / (a - b),  f[a, a] = p a^(p-1),
    // on the clamped spectrum, eigenvalues floored at kOccupationFloor
    // when p < 1.
    std::vector<Eigen::MatrixXd> energy_gradient(
        const DensityMatrixState& st,
        const std::vector<BlockEigen>* eigs_in = nullptr) const {
        check_state(st);
        std::vector<BlockEigen> own;
        const std::vector<BlockEigen>* eigs = eigs_in;
        if (!eigs) {
            for (const auto& b : st.blocks)
                own.push_back(eigen_decompose(b.G));
            eigs = &own;
        }
        const std::vector<Eigen::MatrixXd> F = block_powers(st, eigs);
        const Eigen::VectorXd phi = hartree_potential(density(st));

        std::vector<Eigen::MatrixXd> grad;
        grad.reserve(st.blocks.size());
        for (std::size_t l = 0; l < st.blocks.size(); ++l) {
            const int deg = st.blocks[l].degeneracy();
            const Eigen::Index n = grid_->size();

            Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
            for (std::size_t lp = 0; lp < st.blocks.size(); ++lp)
                for (int k = 0; k <= table_.k_max(); ++k) {
                    const double A = table_.A(static_cast<int>(l),
                                              static_cast<int>(lp), k);
                    if (A == 0.0) continue;
                    W += A * F[lp].cwiseProduct(kernels_[k]);
                }

            Eigen::MatrixXd gradX;
            if (p_ == 1.0) {
                gradX = W;
            } else {
                const auto& e = (*eigs)[l];
                Eigen::VectorXd lam = e.lambda;
                for (Eigen::Index i = 0; i < lam.size(); ++i)
                    lam[i] = std::clamp(lam[i], kDerivativeFloor, 1.0);
                Eigen::MatrixXd Wt = e.U.transpose() * W * e.U;
                for (Eigen::Index i = 0; i < n; ++i)
                    for (Eigen::Index j = 0; j < n; ++j)
                        Wt(i, j) *= divided_difference(lam[i], lam[j]);
                gradX = e.U * Wt * e.U.transpose();
            }

            Eigen::MatrixXd g = deg * kinetic_[l];
            for (Eigen::Index i = 0; i < n; ++i)
                g(i, i) += deg * (-Z_ / grid_->r[i] + phi[i]);
            g -= gradX;
            // symmetrize against roundoff
            g = 0.5 * (g + g.transpose()).eval();
            grad.push_back(std::move(g));
        }
        return grad;
    }

   private:
    // Divided difference of x -> x^p; switches to the symmetric-limit
    // form p*((a+b)/2)^(p-1) when |a - b| < 1e-9 to avoid catastrophic
    // cancellation.
    double divided_difference(double a, double b) const {
        if (std::abs(a - b) < 1e-9)
            return p_ * std::pow(0.5 * (a + b), p_ - 1.0);
        return (std::pow(a, p_) - std::pow(b, p_)) / (a - b);
    }

    GridPtr grid_;
    double Z_;
    double p_;
    MultipoleTable table_;
    std::vector<Eigen::MatrixXd> kinetic_;
    std::vector<Eigen::MatrixXd> kernels_;
};

}  // namespace poweratom
