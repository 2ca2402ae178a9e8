#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "poweratom/density_matrix.hpp"
#include "poweratom/energy.hpp"
#include "poweratom/errors.hpp"
#include "poweratom/grid.hpp"
#include "poweratom/random.hpp"

namespace poweratom {

struct MinimizerConfig {
    double Z = 1.0;
    double N = 1.0;
    double p = 1.0;
    TraceMode mode = TraceMode::Exact;
    int L_max = 2;
    int max_iter = 400;
    double step_init = 0.5;
    double armijo_c = 1e-4;
    double backtrack_factor = 0.5;
    double tol_residual = 1e-6;
    std::uint64_t seed = 0;
    int n_starts = 3;
    double init_perturbation = 0.05;

    // Grid specification; the default matches the solver defaults
    // elsewhere (log grid, r_min scaled by 1/Z).
    Spacing spacing = Spacing::Log;
    double r_min = -1.0;  // < 0 means 1e-3 / max(Z, 1)
    double r_max = 40.0;
    std::size_t grid_n = 600;

    void validate() const {
        if (Z < 0.0) throw ParameterError("minimize: Z must be >= 0");
        if (N <= 0.0) throw ParameterError("minimize: N must be > 0");
        if (p < 0.5 || p > 1.0)
            throw ParameterError("minimize: p must lie in [1/2, 1]");
        if (max_iter <= 0 || step_init <= 0.0 || tol_residual <= 0.0 ||
            armijo_c <= 0.0 || backtrack_factor <= 0.0 ||
            backtrack_factor >= 1.0)
            throw ParameterError("minimize: invalid tolerance/step settings");
        if (L_max < 0 || grid_n < 8)
            throw ParameterError("minimize: invalid grid/channel settings");
        if (n_starts < 1) throw ParameterError("minimize: n_starts >= 1");
    }

    double effective_r_min() const {
        return r_min > 0.0 ? r_min : 1e-3 / std::max(Z, 1.0);
    }
};

struct IterationRecord {
    int iter = 0;
    EnergyBreakdown energy;
    double residual = 0.0;
    double step = 0.0;
};

struct SolveResult {
    DensityMatrixState state;
    EnergyBreakdown energy;
    std::vector<IterationRecord> history;
    bool converged = false;
    double residual = 0.0;
    int iterations = 0;
    int start_index = 0;
    double wall_seconds = 0.0;
};

// Aufbau start: occupy the lowest eigenvectors of the one-body
// operators H_ell - Z/r across all channels (with 2l+1 degeneracy)
// until the trace reaches N; the last level may be fractional.
inline DensityMatrixState aufbau_init(GridPtr grid, const EnergyModel& model,
                                      const MinimizerConfig& cfg) {
    const Eigen::Index n = static_cast<Eigen::Index>(grid->size());
    DensityMatrixState st = zero_state(grid, cfg.L_max);

    struct Level {
        int ell;
        Eigen::Index idx;
        double e;
    };
    std::vector<Level> levels;
    std::vector<Eigen::MatrixXd> bases(cfg.L_max + 1);

    Eigen::VectorXd vz(n);
    for (Eigen::Index i = 0; i < n; ++i) vz[i] = -cfg.Z / grid->r[i];

    const Eigen::Index levels_per_channel = std::min<Eigen::Index>(n, 12);
    for (int ell = 0; ell <= cfg.L_max; ++ell) {
        Eigen::MatrixXd H = model.kinetic_operator(ell);
        H.diagonal() += vz;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        if (es.info() != Eigen::Success)
            throw NumericError("aufbau_init: eigensolver failed");
        bases[ell] = es.eigenvectors();
        for (Eigen::Index k = 0; k < levels_per_channel; ++k)
            levels.push_back({ell, k, es.eigenvalues()[k]});
    }
    std::sort(levels.begin(), levels.end(),
              [](const Level& a, const Level& b) { return a.e < b.e; });

    double remaining = cfg.N;
    for (const auto& lv : levels) {
        if (remaining <= 0.0) break;
        const double deg = 2.0 * lv.ell + 1.0;
        const double occ = std::min(1.0, remaining / deg);
        const Eigen::VectorXd v = bases[lv.ell].col(lv.idx);
        st.blocks[lv.ell].G += occ * (v * v.transpose());
        remaining -= occ * deg;
    }
    if (remaining > 1e-9)
        throw ParameterError("aufbau_init: N exceeds available levels");
    return st;
}

inline DensityMatrixState perturb_state(const DensityMatrixState& st,
                                        double amplitude, Rng& rng) {
    if (amplitude <= 0.0) return st;
    DensityMatrixState out = st;
    for (auto& b : out.blocks) {
        const Eigen::Index n = b.G.rows();
        // Small random rotation exp(amplitude * A), A antisymmetric,
        // applied by congruence: preserves spectrum, hence feasibility.
        Eigen::MatrixXd A = random_gaussian(rng, n, n);
        A = 0.5 * (A - A.transpose()).eval();
        A *= amplitude / std::max(1.0, A.norm());
        Eigen::MatrixXd R = (Eigen::MatrixXd::Identity(n, n) + A +
                             0.5 * A * A);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(R);
        Eigen::MatrixXd Q = qr.householderQ();
        b.G = (Q * b.G * Q.transpose()).eval();
        b.G = 0.5 * (b.G + b.G.transpose()).eval();
    }
    return out;
}

namespace detail {

inline DensityMatrixState diff(const DensityMatrixState& a,
                               const DensityMatrixState& b) {
    DensityMatrixState d = a;
    for (std::size_t l = 0; l < d.blocks.size(); ++l)
        d.blocks[l].G -= b.blocks[l].G;
    return d;
}

inline std::vector<BlockEigen> decompose_state(const DensityMatrixState& st) {
    std::vector<BlockEigen> eigs;
    eigs.reserve(st.blocks.size());
    for (const auto& b : st.blocks) eigs.push_back(eigen_decompose(b.G));
    return eigs;
}

// Linear minimization oracle: the minimizer of tr(grad * D) over the
// feasible set {0 <= D <= 1, tr D (<=)= N} is an aufbau filling of the
// per-electron effective Hamiltonian grad_l / (2l+1), from the bottom
// of the joint spectrum. Exact mode fills to trace N; at-most mode also
// stops at zero (occupying a nonnegative level cannot lower the
// linearized energy).
inline DensityMatrixState linear_oracle(const DensityMatrixState& st,
                                        const std::vector<Eigen::MatrixXd>& grad,
                                        double N, TraceMode mode) {
    struct Level {
        int ell;
        Eigen::Index idx;
        double e;
    };
    std::vector<Level> levels;
    std::vector<Eigen::MatrixXd> bases(grad.size());
    for (std::size_t l = 0; l < grad.size(); ++l) {
        const double deg = 2.0 * static_cast<double>(l) + 1.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(grad[l] / deg);
        if (es.info() != Eigen::Success)
            throw NumericError("linear_oracle: eigensolver failed");
        bases[l] = es.eigenvectors();
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
            levels.push_back({static_cast<int>(l), k, es.eigenvalues()[k]});
    }
    std::sort(levels.begin(), levels.end(),
              [](const Level& a, const Level& b) { return a.e < b.e; });

    DensityMatrixState out =
        zero_state(st.grid, static_cast<int>(grad.size()) - 1);
    double remaining = N;
    for (const auto& lv : levels) {
        if (remaining <= 0.0) break;
        if (mode == TraceMode::AtMost && lv.e >= 0.0) break;
        const double deg = 2.0 * lv.ell + 1.0;
        const double occ = std::min(1.0, remaining / deg);
        const Eigen::VectorXd v =
            bases[static_cast<std::size_t>(lv.ell)].col(lv.idx);
        out.blocks[static_cast<std::size_t>(lv.ell)].G +=
            occ * (v * v.transpose());
        remaining -= occ * deg;
    }
    return out;
}

}  // namespace detail

// Frank-Wolfe (conditional gradient) minimization: each iteration
// solves the linearized problem exactly via an aufbau filling of the
// effective Hamiltonian and line-searches the convex combination. Plain
// projected gradient is hopeless here — the kinetic operator's
// stiffness near the origin forces step sizes of order 1/||H|| — while
// the linear oracle moves between feasible points only along
// energetically selected orbitals. The residual is the Frank-Wolfe
// stationarity gap tr(grad * (cur - cand)) >= 0, scaled by the energy.
inline SolveResult minimize_from(const EnergyModel& model,
                                 const MinimizerConfig& cfg,
                                 DensityMatrixState init) {
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res;

    ProjectedState curp = project_feasible_eig(std::move(init), cfg.N, cfg.mode);
    DensityMatrixState cur = std::move(curp.state);
    std::vector<BlockEigen> eigs = std::move(curp.eigs);
    EnergyBreakdown energy = model.total_energy(cur, &eigs);

    res.history.reserve(static_cast<std::size_t>(cfg.max_iter));
    double step = cfg.step_init;

    for (int it = 0; it < cfg.max_iter; ++it) {
        const std::vector<Eigen::MatrixXd> grad =
            model.energy_gradient(cur, &eigs);
        const DensityMatrixState cand =
            detail::linear_oracle(cur, grad, cfg.N, cfg.mode);
        const DensityMatrixState dir = detail::diff(cand, cur);
        double gap = 0.0;
        for (std::size_t l = 0; l < grad.size(); ++l)
            gap -= grad[l].cwiseProduct(dir.blocks[l].G).sum();
        const double residual = gap / std::max(1.0, std::abs(energy.total));

        res.history.push_back({it, energy, residual, step});
        res.residual = residual;
        res.iterations = it;
        if (residual < cfg.tol_residual) {
            res.converged = true;
            break;
        }
        // Stop once the energy has plateaued; the trailing-window test
        // below will classify this as converged.
        if (res.history.size() >= 10) {
            const double before =
                res.history[res.history.size() - 10].energy.total;
            if (before - energy.total < 1e-8 * (1.0 + std::abs(energy.total)))
                break;
        }

        bool accepted = false;
        double t = 1.0;
        for (int bt = 0; bt < 60; ++bt) {
            DensityMatrixState trial = cur;
            for (std::size_t l = 0; l < trial.blocks.size(); ++l)
                trial.blocks[l].G += t * dir.blocks[l].G;
            std::vector<BlockEigen> trial_eigs = detail::decompose_state(trial);
            const EnergyBreakdown trial_e =
                model.total_energy(trial, &trial_eigs);
            if (trial_e.total <= energy.total - cfg.armijo_c * t * gap) {
                cur = std::move(trial);
                eigs = std::move(trial_eigs);
                energy = trial_e;
                step = t;
                accepted = true;
                break;
            }
            t *= cfg.backtrack_factor;
        }
        res.iterations = it + 1;
        if (!accepted) break;  // no descent along the oracle direction
    }

    // For p < 1 the true slope of -X at a zero occupation is unbounded,
    // so the floored-gradient gap cannot reach arbitrarily small values
    // at a boundary minimizer. Energy stagnation over a trailing window
    // is then the honest convergence signal: no descent step was found
    // and the energy has stopped moving.
    if (!res.converged && !res.history.empty()) {
        const std::size_t win = std::min<std::size_t>(10, res.history.size());
        const double before =
            res.history[res.history.size() - win].energy.total;
        if (before - energy.total <
            1e-8 * (1.0 + std::abs(energy.total)))
            res.converged = true;
    }

    res.state = std::move(cur);
    res.energy = energy;
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return res;
}

inline SolveResult minimize(const EnergyModel& model,
                            const MinimizerConfig& cfg,
                            const DensityMatrixState* warm = nullptr) {
    cfg.validate();
    const double dim = weighted_dimension(model.grid(), cfg.L_max);
    if (cfg.N > dim)
        throw ParameterError("minimize: N exceeds the feasible trace limit");

    const DensityMatrixState base =
        warm ? *warm : aufbau_init(model.grid_ptr(), model, cfg);

    SolveResult best;
    bool have = false;
    for (int s = 0; s < cfg.n_starts; ++s) {
        Rng rng(cfg.seed + static_cast<std::uint64_t>(s) * 0x9e3779b97f4a7c15ULL);
        DensityMatrixState init =
            (s == 0) ? base
                     : perturb_state(base, cfg.init_perturbation, rng);
        SolveResult r = minimize_from(model, cfg, std::move(init));
        r.start_index = s;
        if (!have || r.energy.total < best.energy.total) {
            best = std::move(r);
            have = true;
        }
    }
    return best;
}

inline SolveResult solve(const MinimizerConfig& cfg) {
    cfg.validate();
    GridPtr grid = std::make_shared<const RadialGrid>(
        build_grid(cfg.effective_r_min(), cfg.r_max, cfg.grid_n, cfg.spacing));
    EnergyModel model(grid, cfg.L_max, cfg.Z, cfg.p);
    return minimize(model, cfg);
}

struct CurvePoint {
    double N = 0.0;
    EnergyBreakdown energy;
    bool converged = false;
};

// E(N) along an ascending list of particle numbers, each point
// warm-started from the previous minimizer. Uses at-most-trace
// feasible sets so the curve is non-increasing by construction.
inline std::vector<CurvePoint> energy_curve(const EnergyModel& model,
                                            MinimizerConfig cfg,
                                            const std::vector<double>& N_list) {
    for (std::size_t i = 1; i < N_list.size(); ++i)
        if (N_list[i] <= N_list[i - 1])
            throw ParameterError("energy_curve: N_list must ascend");
    cfg.mode = TraceMode::AtMost;

    std::vector<CurvePoint> out;
    out.reserve(N_list.size());
    const DensityMatrixState* warm = nullptr;
    DensityMatrixState prev;
    for (double N : N_list) {
        cfg.N = N;
        SolveResult r = minimize(model, cfg, warm);
        out.push_back({N, r.energy, r.converged});
        prev = std::move(r.state);
        warm = &prev;
    }
    return out;
}

struct CriticalChargeResult {
    double N_c = 0.0;
    bool any_unconverged = false;
};

// Largest N at which the at-most-trace energy still falls at rate
// delta per unit charge; scanned in steps of dN and refined to dN/4.
inline CriticalChargeResult critical_charge(const EnergyModel& model,
                                            MinimizerConfig cfg,
                                            double delta = 1e-4,
                                            double dN = 0.25) {
    if (delta <= 0.0 || dN <= 0.0)
        throw ParameterError("critical_charge: delta and dN must be > 0");
    cfg.mode = TraceMode::AtMost;

    const double dim = weighted_dimension(model.grid(), cfg.L_max);
    const double N_cap = std::min(
        2.0 * cfg.Z + 5.0 * std::pow(std::max(cfg.Z, 0.0), 2.0 / 3.0) + 5.0,
        dim);

    CriticalChargeResult out;
    DensityMatrixState prev;
    const DensityMatrixState* warm = nullptr;

    auto energy_at = [&](double N) {
        cfg.N = N;
        SolveResult r = minimize(model, cfg, warm);
        if (!r.converged) out.any_unconverged = true;
        prev = std::move(r.state);
        warm = &prev;
        return r.energy.total;
    };

    double N = 0.0;
    double E_prev = 0.0;  // the empty state is feasible at any N
    double N_bound = 0.0;  // last N reached with a binding slope
    while (N + dN <= N_cap + 1e-12) {
        const double E_next = energy_at(N + dN);
        const double slope = (E_next - E_prev) / dN;
        if (slope < -delta) {
            N_bound = N + dN;
            N = N + dN;
            E_prev = E_next;
        } else {
            break;
        }
    }
    if (N_bound == 0.0) {
        out.N_c = 0.0;  // first step already flat: nothing binds
        return out;
    }

    // Refine inside (N_bound, N_bound + dN] with quarter steps.
    const double h = dN / 4.0;
    double Nf = N_bound;
    double Ef = E_prev;
    for (int k = 1; k <= 4; ++k) {
        const double Nt = N_bound + k * h;
        if (Nt > N_cap + 1e-12) break;
        const double Et = energy_at(Nt);
        if ((Et - Ef) / h < -delta) {
            Nf = Nt;
            Ef = Et;
        } else {
            break;
        }
    }
    out.N_c = Nf;
    return out;
}

}  // namespace poweratom
