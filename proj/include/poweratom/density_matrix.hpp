#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "poweratom/errors.hpp"
#include "poweratom/grid.hpp"

namespace poweratom {

// Occupation floor used before taking powers/derivatives of lambda^p
// with p < 1; p*lambda^(p-1) diverges at 0 and minimizers of
// Mueller-type functionals carry small fractional occupations.
inline constexpr double kOccupationFloor = 1e-12;

// Floor for eigenvalues inside derivative (divided-difference) formulas
// of lambda^p with p < 1. The slope p*lambda^(p-1) is genuinely
// unbounded at 0 — that is why minimizers carry full-rank occupations —
// but a gradient surrogate must stay bounded for projected-gradient
// steps to make progress; the line search on the exact energy keeps
// every accepted step a true descent step.
inline constexpr double kDerivativeFloor = 1e-5;

// Eigenvalues below this are treated as exact zeros before powering.
// Numerical noise of order machine epsilon in a zero eigenvalue would
// otherwise be amplified to noise^p (e.g. 1e-8 at p = 1/2).
inline constexpr double kSpectralZero = 1e-13;

// One angular-momentum block of the discrete density matrix: the
// weighted representation of the reduced radial kernel g_l(r, s).
// Feasibility means eigenvalues in [0, 1]; the block enters traces and
// densities with degeneracy 2l+1.
struct ChannelBlock {
    int ell = 0;
    Eigen::MatrixXd G;

    int degeneracy() const { return 2 * ell + 1; }
};

struct DensityMatrixState {
    GridPtr grid;
    std::vector<ChannelBlock> blocks;  // ell = 0 .. L_max

    int L_max() const { return static_cast<int>(blocks.size()) - 1; }
};

// Shell density u(r) = 4 pi r^2 rho(r) sampled on the grid nodes.
struct RadialDensity {
    GridPtr grid;
    Eigen::VectorXd u;

    double integral() const {
        double s = 0.0;
        for (Eigen::Index i = 0; i < u.size(); ++i) s += grid->w[i] * u[i];
        return s;
    }
};

inline DensityMatrixState zero_state(GridPtr grid, int L_max) {
    if (L_max < 0) throw ParameterError("zero_state: need L_max >= 0");
    DensityMatrixState st;
    st.grid = std::move(grid);
    const Eigen::Index n = st.grid->size();
    for (int l = 0; l <= L_max; ++l)
        st.blocks.push_back({l, Eigen::MatrixXd::Zero(n, n)});
    return st;
}

// Weighted-dimension of the feasible set: the largest reachable trace.
inline double weighted_dimension(const DensityMatrixState& st) {
    double d = 0.0;
    for (const auto& b : st.blocks)
        d += static_cast<double>(b.degeneracy()) * static_cast<double>(b.G.rows());
    return d;
}

inline double weighted_dimension(const RadialGrid& grid, int L_max) {
    double d = 0.0;
    for (int l = 0; l <= L_max; ++l)
        d += static_cast<double>(2 * l + 1) * static_cast<double>(grid.size());
    return d;
}

inline double trace_total(const DensityMatrixState& st) {
    double t = 0.0;
    for (const auto& b : st.blocks) t += b.degeneracy() * b.G.trace();
    return t;
}

// u(r_i) = sum_l (2l+1) (G_l)_ii / w_i; integrates to trace_total
// exactly in the weighted representation.
inline RadialDensity density(const DensityMatrixState& st) {
    const Eigen::Index n = st.grid->size();
    RadialDensity d;
    d.grid = st.grid;
    d.u = Eigen::VectorXd::Zero(n);
    for (const auto& b : st.blocks)
        for (Eigen::Index i = 0; i < n; ++i)
            d.u[i] += b.degeneracy() * b.G(i, i) / st.grid->w[i];
    return d;
}

// Eigendecomposition bundle kept alongside states by the minimizer so
// fractional powers and projections can reuse a single factorization.
struct BlockEigen {
    Eigen::MatrixXd U;
    Eigen::VectorXd lambda;
};

inline BlockEigen eigen_decompose(const Eigen::MatrixXd& G) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    if (es.info() != Eigen::Success) {
        // the tridiagonal QL iteration can hit its internal cap on
        // spectra clustered at the box edges {0, 1}; a diagonal jitter
        // (subtracted back from the eigenvalues) breaks the cluster
        // without biasing the result — escalate until it converges
        const Eigen::MatrixXd S = 0.5 * (G + G.transpose());
        const double scale = std::max(S.cwiseAbs().maxCoeff(), 1.0);
        const Eigen::MatrixXd I =
            Eigen::MatrixXd::Identity(S.rows(), S.cols());
        for (double f : {1e-14, 1e-13, 1e-12, 1e-11, 1e-10}) {
            const double jit = f * scale;
            es.compute(S + jit * I);
            if (es.info() == Eigen::Success)
                return {es.eigenvectors(),
                        (es.eigenvalues().array() - jit).matrix()};
        }
        throw NumericError("eigendecomposition failed");
    }
    return BlockEigen{es.eigenvectors(), es.eigenvalues()};
}

inline Eigen::MatrixXd assemble(const BlockEigen& e,
                                const Eigen::VectorXd& lambda) {
    return e.U * lambda.asDiagonal() * e.U.transpose();
}

// G^p on the clamped spectrum: eigenvalues are clipped to [0, 1] before
// powering, so the result is again a feasible block.
inline ChannelBlock fractional_power(const ChannelBlock& block, double p) {
    if (!(p >= 0.0)) throw ParameterError("fractional_power: need p >= 0");
    BlockEigen e = eigen_decompose(block.G);
    Eigen::VectorXd lp = e.lambda;
    for (Eigen::Index i = 0; i < lp.size(); ++i) {
        double l = std::clamp(lp[i], 0.0, 1.0);
        if (l < kSpectralZero) l = 0.0;
        lp[i] = (p == 1.0) ? l : std::pow(l, p);
    }
    return ChannelBlock{block.ell, assemble(e, lp)};
}

enum class TraceMode { Exact, AtMost };

inline std::string to_string(TraceMode m) {
    return m == TraceMode::Exact ? "exact-trace" : "at-most-trace";
}

inline TraceMode trace_mode_from_string(const std::string& s) {
    if (s == "exact-trace") return TraceMode::Exact;
    if (s == "at-most-trace") return TraceMode::AtMost;
    throw ParameterError("unknown trace mode: " + s);
}

namespace detail {

// Degeneracy-weighted clipped trace sum_l (2l+1) sum_i clip(l_i - mu).
inline double shifted_trace(const std::vector<BlockEigen>& eigs,
                            const std::vector<int>& degs, double mu) {
    double t = 0.0;
    for (std::size_t b = 0; b < eigs.size(); ++b) {
        const auto& lam = eigs[b].lambda;
        double s = 0.0;
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            s += std::clamp(lam[i] - mu, 0.0, 1.0);
        t += degs[b] * s;
    }
    return t;
}

}  // namespace detail

// Euclidean (degeneracy-weighted Frobenius) projection onto
// {0 <= G_l <= 1, sum (2l+1) tr G_l = N} (exact mode) or "<= N"
// (at-most mode): eigendecompose each block and project the eigenvalue
// vector onto the capped simplex via a scalar shift mu found by
// bisection on clip(lambda - mu, 0, 1). In at-most mode mu = 0 is used
// whenever the unshifted clip already satisfies the trace bound.
struct ProjectedState {
    DensityMatrixState state;
    std::vector<BlockEigen> eigs;  // eigensystem of the projected blocks
};

inline ProjectedState project_feasible_eig(const DensityMatrixState& st,
                                           double N, TraceMode mode) {
    if (!(N >= 0.0)) throw ParameterError("project_feasible: need N >= 0");
    if (N > weighted_dimension(st) * (1.0 + 1e-12))
        throw ParameterError("project_feasible: N exceeds weighted dimension");

    std::vector<BlockEigen> eigs;
    std::vector<int> degs;
    eigs.reserve(st.blocks.size());
    double lo = 0.0, hi = 0.0;
    for (const auto& b : st.blocks) {
        eigs.push_back(eigen_decompose(b.G));
        degs.push_back(b.degeneracy());
        lo = std::min(lo, eigs.back().lambda.minCoeff() - 1.0);
        hi = std::max(hi, eigs.back().lambda.maxCoeff());
    }

    double mu = 0.0;
    const double unshifted = detail::shifted_trace(eigs, degs, 0.0);
    const bool need_shift =
        (mode == TraceMode::Exact) ? true : (unshifted > N);
    if (need_shift) {
        // shifted_trace is non-increasing in mu; bracket [lo, hi] spans
        // the full range [0, weighted dimension].
        double a = lo, b = hi;
        for (int it = 0; it < 200 && b - a > 0.0; ++it) {
            mu = 0.5 * (a + b);
            if (detail::shifted_trace(eigs, degs, mu) > N)
                a = mu;
            else
                b = mu;
        }
        mu = 0.5 * (a + b);
    }

    // Already feasible (up to roundoff): keep the original blocks
    // bit-for-bit. Rebuilding V·clip(λ)·Vᵀ perturbs near-zero
    // occupations, and for p < 1 those shifts are amplified by λ^p —
    // enough to move a warm-started energy by ~1e−5.
    if (!need_shift) {
        bool inside = true;
        for (const auto& e : eigs)
            if (e.lambda.minCoeff() < -1e-12 ||
                e.lambda.maxCoeff() > 1.0 + 1e-12) {
                inside = false;
                break;
            }
        if (inside) return {st, std::move(eigs)};
    }

    ProjectedState out;
    out.state.grid = st.grid;
    for (std::size_t b = 0; b < eigs.size(); ++b) {
        Eigen::VectorXd lam = eigs[b].lambda;
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            lam[i] = std::clamp(lam[i] - mu, 0.0, 1.0);
        out.state.blocks.push_back(
            {st.blocks[b].ell, assemble(eigs[b], lam)});
        eigs[b].lambda = lam;
        out.eigs.push_back(std::move(eigs[b]));
    }
    return out;
}

inline DensityMatrixState project_feasible(const DensityMatrixState& st,
                                           double N, TraceMode mode) {
    return project_feasible_eig(st, N, mode).state;
}

// Degeneracy-weighted Frobenius inner product and norm; the metric in
// which project_feasible is the nearest-point map.
inline double dot(const DensityMatrixState& a, const DensityMatrixState& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.blocks.size(); ++i)
        s += a.blocks[i].degeneracy() *
             a.blocks[i].G.cwiseProduct(b.blocks[i].G).sum();
    return s;
}

inline double norm_frobenius(const DensityMatrixState& a) {
    return std::sqrt(dot(a, a));
}

}  // namespace poweratom
