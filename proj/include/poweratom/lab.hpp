#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "poweratom/density_matrix.hpp"
#include "poweratom/energy.hpp"
#include "poweratom/errors.hpp"
#include "poweratom/random.hpp"

namespace poweratom {

struct TrialReport {
    std::string id;
    int trials = 0;
    double worst_margin = 0.0;
    std::uint64_t seed = 0;
    double tolerance = 0.0;
    bool pass = false;

    static TrialReport make(std::string id, int trials, double worst,
                            std::uint64_t seed, double tol) {
        TrialReport r;
        r.id = std::move(id);
        r.trials = trials;
        r.worst_margin = worst;
        r.seed = seed;
        r.tolerance = tol;
        r.pass = worst >= -tol;
        return r;
    }
};

inline Eigen::MatrixXd matrix_power_spectral(const Eigen::MatrixXd& A,
                                             double p) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success)
        throw NumericError("matrix_power_spectral: eigensolver failed");
    Eigen::VectorXd lam = es.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        lam[i] = std::pow(std::max(lam[i], 0.0), p);
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

// Operator-monotonicity at the localization level: for contractions
// 0 <= G <= 1 and diagonal 0 <= chi <= 1, (chi G chi)^p - chi G^p chi
// is positive semidefinite. Margin = most negative eigenvalue seen.
inline TrialReport check_loewner_power(int n, double p, int trials,
                                       std::uint64_t seed,
                                       double tol = 1e-10) {
    if (n < 2) throw ParameterError("check_loewner_power: n >= 2");
    if (p < 0.5 || p > 1.0)
        throw ParameterError("check_loewner_power: p in [1/2, 1]");
    Rng rng(seed);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        const Eigen::MatrixXd G = random_psd_contraction(rng, n);
        Eigen::VectorXd chi(n);
        for (int i = 0; i < n; ++i) chi[i] = ud(rng);
        const Eigen::MatrixXd lhs =
            chi.asDiagonal() * matrix_power_spectral(G, p) * chi.asDiagonal();
        const Eigen::MatrixXd rhs = matrix_power_spectral(
            chi.asDiagonal() * G * chi.asDiagonal(), p);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rhs - lhs);
        worst = std::min(worst, es.eigenvalues().minCoeff());
    }
    return TrialReport::make("loewner_power", trials, worst, seed, tol);
}

// Coefficient of the resolvent representation of x -> x^{1/p},
//   C^{1/p} = c_p * int_0^inf C^2 (C + z)^{-1} z^{1/p - 2} dz,
// from the Beta integral int_0^inf t^{a-1}/(1+t) dt = pi / sin(pi a).
inline double resolvent_power_coefficient(double p) {
    if (!(p > 0.5 && p < 1.0))
        throw ParameterError("resolvent_power_coefficient: p in (1/2, 1)");
    return std::sin(std::numbers::pi * (1.0 / p - 1.0)) / std::numbers::pi;
}

inline Eigen::MatrixXd resolvent_power(const Eigen::MatrixXd& C, double p,
                                       double step = 0.05,
                                       double span = 60.0) {
    const double a = 1.0 / p;
    const double cp = resolvent_power_coefficient(p);
    const Eigen::Index n = C.rows();
    const Eigen::MatrixXd C2 = C * C;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    // Trapezoid in u = log z; the integrand decays exponentially in u
    // on both sides for spectra bounded away from 0.
    const auto m = static_cast<long>(std::round(2.0 * span / step));
    for (long i = 0; i <= m; ++i) {
        const double u = -span + step * static_cast<double>(i);
        const double z = std::exp(u);
        const double weight = (i == 0 || i == m) ? 0.5 : 1.0;
        Eigen::MatrixXd R =
            (C + z * Eigen::MatrixXd::Identity(n, n)).ldlt().solve(C2);
        acc += weight * std::pow(z, a - 1.0) * R;
    }
    return cp * step * acc;
}

inline TrialReport check_integral_representation(int n, double p,
                                                 std::uint64_t seed,
                                                 double quad_tol = 1e-6) {
    Rng rng(seed);
    // Spectrum bounded below so the quadrature window covers the
    // integrand's support in log z.
    const Eigen::MatrixXd C = random_psd_contraction(rng, n, 0.05, 1.0);
    const Eigen::MatrixXd exact = matrix_power_spectral(C, 1.0 / p);
    const Eigen::MatrixXd quad = resolvent_power(C, p);
    const double rel = (quad - exact).norm() / exact.norm();
    // Margin convention: tolerance minus error, negative on failure.
    return TrialReport::make("integral_representation", 1, quad_tol - rel,
                             seed, 0.0);
}

// Radial localization profiles: 1 on [0, a], smooth ramp down to 0 at
// (1 + lambda) a. cos/sin ramps make chi^2 + (complement)^2 = 1 exact.
struct RadialProfile {
    double a = 1.0;
    double lambda = 0.5;

    double ramp(double r) const {
        if (r <= a) return 0.0;
        if (r >= (1.0 + lambda) * a) return 1.0;
        return (r - a) / (lambda * a);
    }
    double inner(double r) const {
        return std::cos(0.5 * std::numbers::pi * ramp(r));
    }
    double outer(double r) const {
        return std::sin(0.5 * std::numbers::pi * ramp(r));
    }

    Eigen::VectorXd inner_on(const RadialGrid& g) const {
        Eigen::VectorXd v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = inner(g.r[i]);
        return v;
    }
    Eigen::VectorXd outer_on(const RadialGrid& g) const {
        Eigen::VectorXd v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = outer(g.r[i]);
        return v;
    }
};

inline DensityMatrixState localize(const DensityMatrixState& st,
                                   const Eigen::VectorXd& chi) {
    DensityMatrixState out = st;
    for (auto& b : out.blocks)
        b.G = (chi.asDiagonal() * b.G * chi.asDiagonal()).eval();
    return out;
}

// Cross Coulomb coupling of two node-weight vectors a, b (already
// including quadrature weights): sum_ij a_i m_0(r_i, r_j) b_j.
inline double cross_coulomb(const EnergyModel& model,
                            const Eigen::VectorXd& a,
                            const Eigen::VectorXd& b) {
    return a.dot(model.raw_kernel(0) * b);
}

// Cross exchange coupling sum over x-weights chi_a^2, y-weights chi_b^2:
// iint chi_a^2(x) |delta(x,y)|^2 chi_b^2(y) / |x-y| for the operator
// with weighted radial blocks F_l.
inline double cross_exchange(const EnergyModel& model,
                             const std::vector<Eigen::MatrixXd>& F,
                             const Eigen::VectorXd& wa,
                             const Eigen::VectorXd& wb) {
    double X = 0.0;
    for (std::size_t l = 0; l < F.size(); ++l)
        for (std::size_t lp = 0; lp < F.size(); ++lp)
            for (int k = 0; k <= model.table().k_max(); ++k) {
                const double A = model.table().A(static_cast<int>(l),
                                                 static_cast<int>(lp), k);
                if (A == 0.0) continue;
                const Eigen::MatrixXd P = F[l].cwiseProduct(F[lp]);
                X += 0.5 * A * wa.dot(P.cwiseProduct(model.raw_kernel(k)) * wb);
            }
    return X;
}

// Exchange-kinetic bound: X(chi G^p chi) <= tr(-L chi G chi)^{1/2}
// (int chi^2 rho)^{1/2}. Margin is RHS - LHS per profile, worst kept.
inline TrialReport check_hardy_exchange(
    const EnergyModel& model, const DensityMatrixState& st,
    const std::vector<RadialProfile>& profiles, double tol = 1e-8) {
    model.check_state(st);
    const RadialGrid& g = model.grid();
    const RadialDensity rho = density(st);
    double worst = std::numeric_limits<double>::infinity();
    int trials = 0;
    for (const auto& prof : profiles) {
        const Eigen::VectorXd chi = prof.inner_on(g);
        std::vector<Eigen::MatrixXd> F = model.block_powers(st);
        for (auto& Fl : F)
            Fl = (chi.asDiagonal() * Fl * chi.asDiagonal()).eval();
        const double lhs = model.exchange_from_powers(F);
        const double T = model.kinetic_energy(localize(st, chi));
        double chi2rho = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            chi2rho += g.w[i] * chi[static_cast<Eigen::Index>(i)] *
                       chi[static_cast<Eigen::Index>(i)] *
                       rho.u[static_cast<Eigen::Index>(i)];
        const double rhs = std::sqrt(std::max(T, 0.0)) *
                           std::sqrt(std::max(chi2rho, 0.0));
        worst = std::min(worst, rhs - lhs);
        ++trials;
    }
    return TrialReport::make("hardy_exchange", trials, worst, 0, tol);
}

// Edge-based localization cost of the discrete kinetic form: for a
// quadratic partition {f_c},
//   sum_c tr(-L f_c G f_c) - tr(-L G)
//     = sum_l (2l+1) sum_edges Ghat_{i,i+1} / d_e * sum_c (df_c)^2
// exactly, where Ghat is the block in the unweighted representation.
// Boundary (Dirichlet) edges drop out since sum_c f_c^2 = 1.
inline double ims_edge_cost(const EnergyModel& model,
                            const DensityMatrixState& st,
                            const std::vector<Eigen::VectorXd>& fs) {
    const RadialGrid& g = model.grid();
    const std::size_t n = g.size();
    double cost = 0.0;
    for (const auto& b : st.blocks) {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double d = g.r[i + 1] - g.r[i];
            double df2 = 0.0;
            for (const auto& f : fs) {
                const double df = f[static_cast<Eigen::Index>(i + 1)] -
                                  f[static_cast<Eigen::Index>(i)];
                df2 += df * df;
            }
            const double ghat = b.G(static_cast<Eigen::Index>(i),
                                    static_cast<Eigen::Index>(i + 1)) /
                                (g.sw[i] * g.sw[i + 1]);
            s += ghat / d * df2;
        }
        cost += b.degeneracy() * s;
    }
    return cost;
}

struct IMSReport {
    double identity_error = 0.0;   // relative kinetic identity defect
    double worst_margin = 0.0;     // full inequality margin (>= 0 expected)
    bool identity_pass = false;
    bool inequality_pass = false;
};

// Localization inequality for the full energy: for f_in^2 + f_out^2 = 1,
//   sum_c E(f_c G f_c) - E(G) <= edge_cost
//     + iint f_in^2(x) (|G^p(x,y)|^2 - rho(x) rho(y)) f_out^2(y) / |x-y|.
// The kinetic part alone is an identity of the discrete form and is
// checked separately to tight tolerance.
inline IMSReport check_ims(const EnergyModel& model,
                           const DensityMatrixState& st,
                           const std::vector<RadialProfile>& partitions,
                           double identity_tol = 1e-8,
                           double margin_tol = 1e-8) {
    model.check_state(st);
    const RadialGrid& g = model.grid();
    const RadialDensity rho = density(st);
    IMSReport rep;
    rep.identity_error = 0.0;
    rep.worst_margin = std::numeric_limits<double>::infinity();

    for (const auto& prof : partitions) {
        const Eigen::VectorXd f1 = prof.inner_on(g);
        const Eigen::VectorXd f2 = prof.outer_on(g);
        const DensityMatrixState s1 = localize(st, f1);
        const DensityMatrixState s2 = localize(st, f2);
        const double cost = ims_edge_cost(model, st, {f1, f2});

        // (a) exact kinetic localization identity; the defect is pure
        // roundoff, so compare it against the kinetic scale involved
        const double T = model.kinetic_energy(st);
        const double kin_defect = model.kinetic_energy(s1) +
                                  model.kinetic_energy(s2) - T - cost;
        rep.identity_error = std::max(
            rep.identity_error,
            std::abs(kin_defect) / std::max(1.0, std::abs(T) + cost));

        // (b) full energy inequality
        const double lhs = model.total_energy(s1).total +
                           model.total_energy(s2).total -
                           model.total_energy(st).total;
        Eigen::VectorXd w1(g.size()), w2(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            w1[ii] = g.w[i] * f1[ii] * f1[ii];
            w2[ii] = g.w[i] * f2[ii] * f2[ii];
        }
        const std::vector<Eigen::MatrixXd> F = model.block_powers(st);
        Eigen::VectorXd f1sq = f1.cwiseProduct(f1);
        Eigen::VectorXd f2sq = f2.cwiseProduct(f2);
        const double cross_x = cross_exchange(model, F, f1sq, f2sq);
        Eigen::VectorXd ru(g.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            ru[static_cast<Eigen::Index>(i)] =
                rho.u[static_cast<Eigen::Index>(i)];
        Eigen::VectorXd a = w1.cwiseProduct(ru), b = w2.cwiseProduct(ru);
        const double cross_d = cross_coulomb(model, a, b);
        const double rhs = cost + cross_x - cross_d;
        rep.worst_margin = std::min(rep.worst_margin, rhs - lhs);
    }
    rep.identity_pass = rep.identity_error <= identity_tol;
    rep.inequality_pass = rep.worst_margin >= -margin_tol;
    return rep;
}

// Binding inequality: E_Z(G) <= E_Z(chi1 G chi1) + E_{Z=0}(chi2 G chi2)
// for any radial quadratic partition. Margin = RHS - LHS.
inline TrialReport check_binding(const EnergyModel& model,
                                 const EnergyModel& model_free,
                                 const DensityMatrixState& st,
                                 const std::vector<RadialProfile>& partitions,
                                 double tol = 1e-8) {
    model.check_state(st);
    if (model_free.Z() != 0.0)
        throw ParameterError("check_binding: second model must have Z = 0");
    const RadialGrid& g = model.grid();
    double worst = std::numeric_limits<double>::infinity();
    int trials = 0;
    for (const auto& prof : partitions) {
        const DensityMatrixState s1 = localize(st, prof.inner_on(g));
        const DensityMatrixState s2 = localize(st, prof.outer_on(g));
        const double lhs = model.total_energy(st).total;
        const double rhs = model.total_energy(s1).total +
                           model_free.total_energy(s2).total;
        worst = std::min(worst, rhs - lhs);
        ++trials;
    }
    return TrialReport::make("binding", trials, worst, 0, tol);
}

struct AprioriReport {
    double rho53 = 0.0;     // int rho^{5/3}
    double kinetic = 0.0;   // tr(-L G)
    double hartree = 0.0;   // D[rho]
    double ratio = 0.0;     // (rho53 + kinetic + hartree) / (Z^{7/3} + N)
};

inline AprioriReport check_apriori(const EnergyModel& model,
                                   const DensityMatrixState& st) {
    model.check_state(st);
    const RadialGrid& g = model.grid();
    const RadialDensity rho = density(st);
    AprioriReport rep;
    using std::numbers::pi;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double u = rho.u[static_cast<Eigen::Index>(i)];
        const double vol = u / (4.0 * pi * g.r[i] * g.r[i]);
        rep.rho53 += g.w[i] * 4.0 * pi * g.r[i] * g.r[i] *
                     std::pow(std::max(vol, 0.0), 5.0 / 3.0);
    }
    rep.kinetic = model.kinetic_energy(st);
    rep.hartree = hartree_energy(rho);
    const double N = trace_total(st);
    rep.ratio = (rep.rho53 + rep.kinetic + rep.hartree) /
                (std::pow(model.Z(), 7.0 / 3.0) + N);
    return rep;
}

struct CoulombEstimateRow {
    double x = 0.0;
    double lhs = 0.0;
    double rhs_core = 0.0;  // ||f||_{5/3}^{5/6} (x D[f])^{1/12}
    double C_impl = 0.0;
};

// Interior Coulomb estimate for a signed radial density f (shell
// convention, f = 4 pi r^2 * volume density):
//   |int_{|y| < x} f / |x - y|| = |enclosed f(x)| / x
// against ||f||_{5/3}^{5/6} (x D[f])^{1/12}; reports the implied
// constant per evaluation point.
inline std::vector<CoulombEstimateRow> check_coulomb_estimate(
    const RadialDensity& f, const std::vector<double>& x_list) {
    const RadialGrid& g = *f.grid;
    using std::numbers::pi;
    double norm53 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double vol = f.u[static_cast<Eigen::Index>(i)] /
                           (4.0 * pi * g.r[i] * g.r[i]);
        norm53 += g.w[i] * 4.0 * pi * g.r[i] * g.r[i] *
                  std::pow(std::abs(vol), 5.0 / 3.0);
    }
    const double fnorm = std::pow(norm53, 3.0 / 5.0);
    const double Df = hartree_energy(f);
    if (Df <= 0.0)
        throw DiagnosticError("check_coulomb_estimate: D[f] <= 0");

    std::vector<CoulombEstimateRow> rows;
    for (double x : x_list) {
        if (x <= 0.0)
            throw ParameterError("check_coulomb_estimate: x must be > 0");
        double enclosed = 0.0;
        for (std::size_t i = 0; i < g.size() && g.r[i] < x; ++i)
            enclosed += g.w[i] * f.u[static_cast<Eigen::Index>(i)];
        CoulombEstimateRow row;
        row.x = x;
        row.lhs = std::abs(enclosed) / x;
        row.rhs_core = std::pow(fnorm, 5.0 / 6.0) *
                       std::pow(x * Df, 1.0 / 12.0);
        row.C_impl = row.rhs_core > 0.0 ? row.lhs / row.rhs_core : 0.0;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace poweratom
